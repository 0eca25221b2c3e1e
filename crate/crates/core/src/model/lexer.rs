//! Line-preserving tokenizer for brace-delimited, Java-like source.
//!
//! Comments vanish and string/char/text-block literals collapse into a single
//! opaque token, so identifier scanning never sees their contents. Every
//! token carries its 1-based line in the original file.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokKind {
    Ident,
    Number,
    Literal,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub text: String,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn is(&self, s: &str) -> bool {
        self.kind != TokKind::Literal && self.text == s
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokKind::Ident && !is_keyword(&self.text)
    }
}

const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
];

pub const COMPOUND_ASSIGN: &[&str] = &[
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
];

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
    "var",
    "yield",
    "record",
];

pub const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "double", "float", "int", "long", "short", "void", "var",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexError {
    #[error("unterminated comment starting on line {line}")]
    UnterminatedComment { line: usize },
    #[error("unterminated literal on line {line}")]
    UnterminatedLiteral { line: usize },
}

/// Result of lexing a whole file.
#[derive(Debug, Clone)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    /// Per-line flag (index = line - 1): does the line hold any code token.
    pub has_code: Vec<bool>,
}

pub fn tokenize(source: &str) -> Result<Lexed, LexError> {
    let chars: Vec<char> = source.chars().collect();
    let line_count = source.lines().count().max(1);
    let mut has_code = vec![false; line_count + 1];
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let next = chars.get(i + 1).copied();
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            let start = line;
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(LexError::UnterminatedComment { line: start });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }

        let (start_line, start_col) = (line, col);
        if c == '"' || c == '\'' {
            let text_block = c == '"' && next == Some('"') && chars.get(i + 2) == Some(&'"');
            if text_block {
                for _ in 0..3 {
                    bump!();
                }
                loop {
                    if i >= chars.len() {
                        return Err(LexError::UnterminatedLiteral { line: start_line });
                    }
                    if chars[i] == '\\' {
                        bump!();
                        if i < chars.len() {
                            bump!();
                        }
                        continue;
                    }
                    if chars[i] == '"'
                        && chars.get(i + 1) == Some(&'"')
                        && chars.get(i + 2) == Some(&'"')
                    {
                        for _ in 0..3 {
                            bump!();
                        }
                        break;
                    }
                    mark(&mut has_code, line);
                    bump!();
                }
            } else {
                bump!();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(LexError::UnterminatedLiteral { line: start_line });
                    }
                    if chars[i] == '\\' {
                        bump!();
                        if i < chars.len() {
                            bump!();
                        }
                        continue;
                    }
                    if chars[i] == c {
                        bump!();
                        break;
                    }
                    bump!();
                }
            }
            mark(&mut has_code, start_line);
            mark(&mut has_code, line);
            tokens.push(Token {
                kind: TokKind::Literal,
                text: if c == '"' { "\"\"".into() } else { "''".into() },
                line: start_line,
                col: start_col,
            });
            continue;
        }

        mark(&mut has_code, line);
        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut text = String::new();
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                text.push(chars[i]);
                bump!();
            }
            tokens.push(Token {
                kind: TokKind::Ident,
                text,
                line: start_line,
                col: start_col,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) {
            let mut text = String::new();
            while i < chars.len() {
                let ch = chars[i];
                let continues = ch.is_alphanumeric()
                    || ch == '_'
                    || (ch == '.' && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit()))
                    || ((ch == '+' || ch == '-')
                        && matches!(text.chars().last(), Some('e' | 'E' | 'p' | 'P'))
                        && !text.starts_with("0x"));
                if !continues {
                    break;
                }
                text.push(ch);
                bump!();
            }
            tokens.push(Token {
                kind: TokKind::Number,
                text,
                line: start_line,
                col: start_col,
            });
            continue;
        }
        let op = OPERATORS.iter().find(|op| {
            op.chars()
                .enumerate()
                .all(|(k, oc)| chars.get(i + k) == Some(&oc))
        });
        let text = match op {
            Some(op) => op.to_string(),
            None => c.to_string(),
        };
        for _ in 0..text.chars().count() {
            bump!();
        }
        tokens.push(Token {
            kind: TokKind::Punct,
            text,
            line: start_line,
            col: start_col,
        });
    }

    Ok(Lexed { tokens, has_code })
}

fn mark(has_code: &mut Vec<bool>, line: usize) {
    if line >= has_code.len() {
        has_code.resize(line + 1, false);
    }
    has_code[line - 1] = true;
}

impl Lexed {
    pub fn line_has_code(&self, line: usize) -> bool {
        line >= 1 && self.has_code.get(line - 1).copied().unwrap_or(false)
    }
}
