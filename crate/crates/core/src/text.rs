//! Tokenization shared by the corpus readers, the generator and the renga
//! checker.

/// A token is punctuation when it carries no letters or digits ("--", ",").
pub fn is_punctuation(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

/// Trims leading and trailing characters that are neither alphanumeric nor
/// an inner apostrophe.
pub fn strip_punctuation(word: &str) -> &str {
    word.trim_matches(|c: char| !c.is_alphanumeric())
}

/// Splits a verse line into lowercase tokens. Punctuation glued to a word
/// ("pond," or "--dusk") is peeled off into its own token so that it
/// survives as a literal in skeletons.
pub fn tokenize(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in line.split_whitespace() {
        let chunk = chunk.to_lowercase();
        if is_punctuation(&chunk) {
            out.push(chunk);
            continue;
        }
        let start = chunk.find(|c: char| c.is_alphanumeric()).unwrap_or(0);
        let end = chunk
            .rfind(|c: char| c.is_alphanumeric())
            .map(|i| i + chunk[i..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(chunk.len());
        if start > 0 {
            out.push(chunk[..start].to_string());
        }
        out.push(chunk[start..end].to_string());
        if end < chunk.len() {
            out.push(chunk[end..].to_string());
        }
    }
    out
}

/// Crude English stem used for repetition checks: "petals" and "petal",
/// "raked" and "rakes" collide. A final silent "e" is dropped so the
/// result is a key, not always a word.
pub fn lemma(word: &str) -> String {
    let mut key = inflection_stem(&word.to_lowercase());
    if key.len() > 3 && key.ends_with('e') {
        key.pop();
    }
    key
}

fn inflection_stem(w: &str) -> String {
    let n = w.chars().count();
    if n > 4 {
        if let Some(stem) = w.strip_suffix("ies") {
            return format!("{stem}y");
        }
        if let Some(stem) = w.strip_suffix("ing") {
            return undouble(stem);
        }
    }
    if n > 3 {
        if let Some(stem) = w.strip_suffix("ed") {
            return undouble(stem);
        }
        if !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is") {
            if let Some(stem) = w.strip_suffix("es") {
                if stem.ends_with("sh") || stem.ends_with("ch") || stem.ends_with('x') {
                    return stem.to_string();
                }
            }
            if let Some(stem) = w.strip_suffix('s') {
                return stem.to_string();
            }
        }
    }
    w.to_string()
}

// "stopp" -> "stop", "shimmer" stays.
fn undouble(stem: &str) -> String {
    let b = stem.as_bytes();
    if b.len() >= 3
        && b[b.len() - 1] == b[b.len() - 2]
        && !matches!(b[b.len() - 1], b'l' | b's' | b'z' | b'f')
    {
        stem[..stem.len() - 1].to_string()
    } else {
        stem.to_string()
    }
}
