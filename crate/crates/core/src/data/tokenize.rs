//! Penn Treebank word tokenizer.
//!
//! A rule-for-rule port of the classic Treebank regular-expression
//! tokenizer: rules are applied in the order below to the whole string, then
//! the result is split on whitespace.
//!
//! 1. Opening quotes: a leading `"` becomes ` `` `, and `"`/`''` after a space
//!    or opening bracket becomes ` `` `.
//! 2. Punctuation: `:`/`,` are split unless followed by a digit (so `3,000`
//!    survives); `...`, `; @ # $ % &`, `? !` are padded; a period is split only
//!    when it ends the text (possibly before closing brackets/quotes); a
//!    single quote followed by a space is split.
//! 3. Brackets `[](){}<>` and `--` are padded.
//! 4. Closing quotes (`''`, `"`) become ` '' `; clitics `'s 'm 'd 'll 're 've
//!    n't` and a bare `'` are split off the preceding word.
//! 5. Fixed contractions: `cannot d'ye gimme gonna gotta lemme more'n wanna
//!    'tis 'twas` are split into two tokens.

use std::sync::OnceLock;

use regex::Regex;

struct Rule {
    re: Regex,
    rep: &'static str,
}

struct Rules {
    starting_quotes: Vec<Rule>,
    punctuation: Vec<Rule>,
    parens: Rule,
    double_dashes: Rule,
    ending_quotes: Vec<Rule>,
    contractions: Vec<Rule>,
}

fn rule(pattern: &str, rep: &'static str) -> Rule {
    Rule {
        re: Regex::new(pattern).expect("valid tokenizer regex"),
        rep,
    }
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        starting_quotes: vec![
            rule(r#"^""#, "``"),
            rule(r"(``)", " ${1} "),
            rule(r#"([ (\[{<])("|'{2})"#, "${1} `` "),
        ],
        punctuation: vec![
            rule(r"([:,])([^\d])", " ${1} ${2}"),
            // `$` in the original also matches before a trailing newline
            rule(r"([:,])(\n?)\z", " ${1} ${2}"),
            rule(r"\.\.\.", " ... "),
            rule(r"[;@#$%&]", " ${0} "),
            rule(r#"([^.])(\.)([\])}>"']*)\s*\z"#, "${1} ${2}${3} "),
            rule(r"[?!]", " ${0} "),
            rule(r"([^'])' ", "${1} ' "),
        ],
        parens: rule(r"[\]\[(){}<>]", " ${0} "),
        double_dashes: rule(r"--", " -- "),
        ending_quotes: vec![
            rule(r"''", " '' "),
            rule(r#"""#, " '' "),
            rule(r"([^' ])('[sS]|'[mM]|'[dD]|') ", "${1} ${2} "),
            rule(r"([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) ", "${1} ${2} "),
        ],
        contractions: vec![
            rule(r"(?i)\b(can)(not)\b", " ${1} ${2} "),
            rule(r"(?i)\b(d)('ye)\b", " ${1} ${2} "),
            rule(r"(?i)\b(gim)(me)\b", " ${1} ${2} "),
            rule(r"(?i)\b(gon)(na)\b", " ${1} ${2} "),
            rule(r"(?i)\b(got)(ta)\b", " ${1} ${2} "),
            rule(r"(?i)\b(lem)(me)\b", " ${1} ${2} "),
            rule(r"(?i)\b(more)('n)\b", " ${1} ${2} "),
            // the original uses a lookahead for the whitespace; keeping it in
            // the match and re-emitting it is equivalent
            rule(r"(?i)\b(wan)(na)(\s)", " ${1} ${2} ${3}"),
            rule(r"(?i) ('t)(is)\b", " ${1} ${2} "),
            rule(r"(?i) ('t)(was)\b", " ${1} ${2} "),
        ],
    })
}

fn apply(text: String, r: &Rule) -> String {
    match r.re.replace_all(&text, r.rep) {
        std::borrow::Cow::Borrowed(_) => text,
        std::borrow::Cow::Owned(s) => s,
    }
}

/// Splits `text` into Treebank tokens. Empty or whitespace-only text yields no tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let r = rules();
    let mut t = text.to_string();
    for x in &r.starting_quotes {
        t = apply(t, x);
    }
    for x in &r.punctuation {
        t = apply(t, x);
    }
    t = apply(t, &r.parens);
    t = apply(t, &r.double_dashes);
    t = format!(" {t} ");
    for x in &r.ending_quotes {
        t = apply(t, x);
    }
    for x in &r.contractions {
        t = apply(t, x);
    }
    t.split_whitespace().map(str::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn contractions_and_final_period() {
        assert_eq!(tok("don't go."), ["do", "n't", "go", "."]);
        assert_eq!(
            tok("They'll save and invest more."),
            ["They", "'ll", "save", "and", "invest", "more", "."]
        );
    }

    #[test]
    fn single_token_and_empty() {
        assert_eq!(tok("hello"), ["hello"]);
        assert!(tok("").is_empty());
        assert!(tok("  \t ").is_empty());
    }

    #[test]
    fn commas() {
        assert_eq!(tok("a,b"), ["a", ",", "b"]);
        assert_eq!(
            tok("hi, my name can't hello,"),
            ["hi", ",", "my", "name", "ca", "n't", "hello", ","]
        );
        assert_eq!(tok("3,000 people"), ["3,000", "people"]);
    }

    #[test]
    fn money_and_inner_periods() {
        assert_eq!(
            tok("Good muffins cost $3.88\nin New York.  Please buy me\ntwo of them.\nThanks."),
            [
                "Good", "muffins", "cost", "$", "3.88", "in", "New", "York.", "Please", "buy", "me", "two", "of",
                "them.", "Thanks", "."
            ]
        );
    }

    #[test]
    fn quotes() {
        assert_eq!(tok("\"Hi,\" she said."), ["``", "Hi", ",", "''", "she", "said", "."]);
        assert_eq!(tok("the dogs' bowls"), ["the", "dogs", "'", "bowls"]);
    }

    #[test]
    fn fixed_contractions() {
        assert_eq!(
            tok("I cannot wait, gonna go"),
            ["I", "can", "not", "wait", ",", "gon", "na", "go"]
        );
        assert_eq!(tok("wanna wanna go"), ["wan", "na", "wan", "na", "go"]);
    }

    #[test]
    fn brackets_and_dashes() {
        assert_eq!(tok("a (b) --c"), ["a", "(", "b", ")", "--", "c"]);
    }
}
