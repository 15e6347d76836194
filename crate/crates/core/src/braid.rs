//! Braid words whose closures lose all linking when any strand is
//! removed, plus deletion simulation, linking counts, and an SVG
//! renderer.
//!
//! Letters follow the usual convention: `k > 0` crosses the strands at
//! positions k and k+1 with the left strand passing over; negative
//! letters are the inverse crossings. Positions are 1-based.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BraidError {
    #[error("strand count {0} not supported (need 2..=8)")]
    StrandCountUnsupported(usize),
    #[error("letter {0} out of range for {1} strands")]
    LetterOutOfRange(i32, usize),
    #[error("strand index {0} out of range for {1} strands")]
    StrandOutOfRange(usize, usize),
    #[error("subset must list at least 2 distinct strands in increasing order")]
    BadSubset,
    #[error("malformed braid text: {0}")]
    BadText(String),
    #[error("deleting strand {0} leaves a word that does not reduce to the identity")]
    NotBrunnian(usize),
    #[error("the braid word itself reduces to the identity")]
    TrivialWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<BraidWord, BraidError> {
        if strands < 2 {
            return Err(BraidError::StrandCountUnsupported(strands));
        }
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(BraidError::LetterOutOfRange(l, strands));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord {
            strands: self.strands,
            letters,
        }
    }

    /// Free reduction: cancel adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> BraidWord {
        let mut stack: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if stack.last() == Some(&-l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        BraidWord {
            strands: self.strands,
            letters: stack,
        }
    }

    /// The permutation the braid induces: entry s is the final position
    /// of the strand starting at position s (both 0-based).
    pub fn permutation(&self) -> Vec<usize> {
        let mut pos: Vec<usize> = (0..self.strands).collect(); // strand -> position
        for &l in &self.letters {
            let k = l.unsigned_abs() as usize - 1;
            for p in pos.iter_mut() {
                if *p == k {
                    *p += 1;
                } else if *p == k + 1 {
                    *p -= 1;
                }
            }
        }
        pos
    }

    /// Removes the strand starting at `strand` (0-based) by walking the
    /// word: crossings involving it disappear and the remaining positions
    /// close up.
    pub fn delete_strand(&self, strand: usize) -> Result<BraidWord, BraidError> {
        if strand >= self.strands {
            return Err(BraidError::StrandOutOfRange(strand, self.strands));
        }
        if self.strands == 2 {
            return BraidWord::new(2, Vec::new());
        }
        let mut p = strand; // current 0-based position of the deleted strand
        let mut letters = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            let k = l.unsigned_abs() as usize - 1; // crossing at positions k, k+1
            if k == p {
                p += 1;
            } else if k + 1 == p {
                p -= 1;
            } else {
                let shifted = if k > p { k as i32 - 1 } else { k as i32 };
                letters.push(l.signum() * (shifted + 1));
            }
        }
        BraidWord::new(self.strands - 1, letters)
    }

    /// Signed crossing counts between strand pairs (twice the linking
    /// number of the closure components for pure braids).
    pub fn crossing_counts(&self) -> Vec<Vec<i64>> {
        let n = self.strands;
        let mut counts = vec![vec![0i64; n]; n];
        let mut at: Vec<usize> = (0..n).collect(); // position -> strand
        for &l in &self.letters {
            let k = l.unsigned_abs() as usize - 1;
            let (a, b) = (at[k], at[k + 1]);
            counts[a][b] += l.signum() as i64;
            counts[b][a] += l.signum() as i64;
            at.swap(k, k + 1);
        }
        counts
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("s:{} w:", self.strands);
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{l}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BraidWord, BraidError> {
        let text = text.trim();
        let rest = text
            .strip_prefix("s:")
            .ok_or_else(|| BraidError::BadText(text.to_string()))?;
        let (count, word) = rest
            .split_once(" w:")
            .ok_or_else(|| BraidError::BadText(text.to_string()))?;
        let strands: usize = count
            .trim()
            .parse()
            .map_err(|_| BraidError::BadText(text.to_string()))?;
        let letters: Result<Vec<i32>, _> = word.split_whitespace().map(str::parse).collect();
        let letters = letters.map_err(|_| BraidError::BadText(text.to_string()))?;
        BraidWord::new(strands, letters)
    }
}

/// A braid word on n strands that is nontrivially linked as a whole but
/// falls apart when any single strand is removed.
///
/// n = 2 is the double crossing, n = 3 the classic alternating word
/// (s1 s2^-1)^3, and larger blocks are commutators [block(n-1), s_(n-1)^2]
/// with the full twist of the last two strands. Removing a strand of the
/// inner block trivializes both of its copies and leaves the twist to
/// cancel its inverse; removing either of the last two strands kills the
/// twist and leaves block(n-1) against its own inverse.
pub fn brunnian_block(n: usize) -> Result<BraidWord, BraidError> {
    if !(2..=8).contains(&n) {
        return Err(BraidError::StrandCountUnsupported(n));
    }
    match n {
        2 => BraidWord::new(2, vec![1, 1]),
        3 => BraidWord::new(3, vec![1, -2, 1, -2, 1, -2]),
        _ => {
            let inner = brunnian_block(n - 1)?;
            let w = BraidWord::new(n, inner.letters.clone())?;
            let s = BraidWord::new(n, vec![(n - 1) as i32; 2])?;
            Ok(w.concat(&s).concat(&w.inverse()).concat(&s.inverse()))
        }
    }
}

/// Embeds a block on the given strands (0-based, strictly increasing) of
/// a wider braid: transport the chosen strands to the bottom positions,
/// run the block there, transport back. Conjugating the whole block keeps
/// the unlinking behaviour intact, which letter-by-letter renumbering
/// would not.
pub fn embed_block(total: usize, subset: &[usize], block: &BraidWord) -> Result<BraidWord, BraidError> {
    if subset.len() < 2 || subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BraidError::BadSubset);
    }
    if *subset.last().unwrap() >= total {
        return Err(BraidError::StrandOutOfRange(*subset.last().unwrap(), total));
    }
    if block.strands() != subset.len() {
        return Err(BraidError::StrandCountUnsupported(block.strands()));
    }
    // transport: walk each chosen strand down to its target slot
    let mut transport = Vec::new();
    for (target, &s) in subset.iter().enumerate() {
        // strands below s that were already moved sit in 0..target, so s
        // currently occupies position s; slide it down to `target`
        for p in (target..s).rev() {
            transport.push((p + 1) as i32);
        }
    }
    let t = BraidWord::new(total, transport)?;
    let inner = BraidWord::new(total, block.letters().to_vec())?;
    Ok(t.concat(&inner).concat(&t.inverse()))
}

/// Concatenates one embedded block per subset.
pub fn compose_blocks(total: usize, subsets: &[Vec<usize>]) -> Result<BraidWord, BraidError> {
    let mut out = BraidWord::new(total, Vec::new())?;
    for subset in subsets {
        let block = brunnian_block(subset.len())?;
        out = out.concat(&embed_block(total, subset, &block)?);
    }
    Ok(out)
}

/// Certifies the unlinking property: the word itself must not reduce to
/// the identity, and removing any single strand must.
pub fn validate_brunnian(word: &BraidWord) -> Result<(), BraidError> {
    if word.free_reduce().letters().is_empty() {
        return Err(BraidError::TrivialWord);
    }
    for s in 0..word.strands() {
        if !word.delete_strand(s)?.free_reduce().letters().is_empty() {
            return Err(BraidError::NotBrunnian(s));
        }
    }
    Ok(())
}

const STRAND_COLORS: [&str; 4] = ["#d62728", "#2ca02c", "#1f77b4", "#e0a800"];

fn strand_color(i: usize) -> String {
    if i < STRAND_COLORS.len() {
        STRAND_COLORS[i].to_string()
    } else {
        // deterministic fallback palette for wider braids
        format!("hsl({},70%,45%)", (i * 47) % 360)
    }
}

/// Renders the braid as an SVG diagram, left to right, one column per
/// letter. Output is byte-deterministic for a given word.
pub fn render_svg(word: &BraidWord) -> String {
    const STEP: i32 = 48;
    const MARGIN: i32 = 24;
    let n = word.strands();
    let cols = word.letters().len() as i32;
    let width = MARGIN * 2 + STEP * (cols + 1);
    let height = MARGIN * 2 + STEP * (n as i32 - 1);
    let y = |p: usize| MARGIN + STEP * p as i32;
    let x = |t: i32| MARGIN + STEP * t;

    let mut at: Vec<usize> = (0..n).collect(); // position -> strand
    let mut body = String::new();
    for (t, &l) in word.letters().iter().enumerate() {
        let t = t as i32;
        let k = l.unsigned_abs() as usize - 1;
        // straight segments for uninvolved strands
        for p in 0..n {
            if p != k && p != k + 1 {
                let _ = writeln!(
                    body,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/>"#,
                    x(t),
                    y(p),
                    x(t + 1),
                    y(p),
                    strand_color(at[p])
                );
            }
        }
        // positive letters put the upper-position strand on top
        let (over_from, under_from) = if l > 0 { (k, k + 1) } else { (k + 1, k) };
        let _ = writeln!(
            body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/>"#,
            x(t),
            y(under_from),
            x(t + 1),
            y(k + k + 1 - under_from),
            strand_color(at[under_from])
        );
        let _ = writeln!(
            body,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#ffffff" stroke-width="9"/>"##,
            x(t),
            y(over_from),
            x(t + 1),
            y(k + k + 1 - over_from),
        );
        let _ = writeln!(
            body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/>"#,
            x(t),
            y(over_from),
            x(t + 1),
            y(k + k + 1 - over_from),
            strand_color(at[over_from])
        );
        at.swap(k, k + 1);
    }
    // trailing straight segments so every strand reaches the right edge
    for p in 0..n {
        let _ = writeln!(
            body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/>"#,
            x(cols),
            y(p),
            x(cols + 1),
            y(p),
            strand_color(at[p])
        );
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n{body}</svg>\n"
    )
}
