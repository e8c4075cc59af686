//! Line tokenizer shared by the text formats.
//!
//! A token that begins with `#` starts a comment running to the end of the
//! line. A `#` inside a token (as in `s->v#p`) is part of the token.

pub(crate) fn tokenized_lines(src: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    src.lines().enumerate().filter_map(|(i, line)| {
        let tokens: Vec<&str> = line.split_whitespace().take_while(|t| !t.starts_with('#')).collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let src = "# header\n\ncombo a b # trailing\n  square s->v#p\n";
        let lines: Vec<_> = tokenized_lines(src).collect();
        assert_eq!(lines, vec![(3, vec!["combo", "a", "b"]), (4, vec!["square", "s->v#p"])]);
    }
}
