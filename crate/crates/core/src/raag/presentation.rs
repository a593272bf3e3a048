use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::RaagError;

/// A generator or its inverse, encoded as `2 * generator + inverse`.
///
/// The derived order is the letter order used for shortlex: generators in
/// presentation order, each positive letter before its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u16);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u16) << 1 | inverse as u16)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn code(self) -> u16 {
        self.0
    }
}

/// A group element: the word it was built from and its shortlex normal form.
///
/// Equality and hashing only look at the normal form.
#[derive(Debug, Clone)]
pub struct GroupElement {
    word: Vec<Letter>,
    normal: Vec<Letter>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            word: Vec::new(),
            normal: Vec::new(),
        }
    }

    /// The word as originally supplied.
    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    /// Shortlex normal form.
    pub fn letters(&self) -> &[Letter] {
        &self.normal
    }

    /// Geodesic word length.
    pub fn length(&self) -> usize {
        self.normal.len()
    }

    pub fn is_identity(&self) -> bool {
        self.normal.is_empty()
    }

    /// Shortlex comparison of normal forms.
    pub fn shortlex_cmp(&self, other: &Self) -> Ordering {
        shortlex_cmp(&self.normal, &other.normal)
    }
}

pub fn shortlex_cmp(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.normal == other.normal
    }
}

impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.normal.hash(state);
    }
}

/// On-disk form: `{generators: [...], commuting_pairs: [[a, b], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationDoc {
    pub generators: Vec<String>,
    pub commuting_pairs: Vec<[String; 2]>,
}

/// A right-angled Artin group presentation: generators plus a symmetric,
/// irreflexive commutation relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    commute: Vec<Vec<bool>>,
}

const IDENTITY_TOKENS: [&str; 3] = ["e", "1", "ε"];
const SUPERSCRIPT_DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

impl Presentation {
    pub fn new<S: AsRef<str>>(
        generators: &[S],
        commuting_pairs: &[(S, S)],
    ) -> Result<Self, RaagError> {
        let generators: Vec<String> = generators.iter().map(|g| g.as_ref().to_string()).collect();
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty() || IDENTITY_TOKENS.contains(&g.as_str()) {
                return Err(RaagError::InvalidPresentation(format!(
                    "generator name {g:?} is reserved"
                )));
            }
            if !g.chars().all(|c| c.is_alphanumeric() || c == '_')
                || g.starts_with(char::is_numeric)
            {
                return Err(RaagError::InvalidPresentation(format!(
                    "generator name {g:?} must be alphanumeric"
                )));
            }
            if generators[..i].contains(g) {
                return Err(RaagError::InvalidPresentation(format!(
                    "duplicate generator {g}"
                )));
            }
        }
        let n = generators.len();
        let mut commute = vec![vec![false; n]; n];
        let find = |name: &str| {
            generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| RaagError::UnknownGenerator(name.to_string()))
        };
        for (a, b) in commuting_pairs {
            let (i, j) = (find(a.as_ref())?, find(b.as_ref())?);
            if i == j {
                return Err(RaagError::InvalidPresentation(format!(
                    "generator {} cannot commute with itself in the relation",
                    generators[i]
                )));
            }
            commute[i][j] = true;
            commute[j][i] = true;
        }
        Ok(Presentation {
            generators,
            commute,
        })
    }

    pub fn from_doc(doc: &PresentationDoc) -> Result<Self, RaagError> {
        let pairs: Vec<(&str, &str)> = doc
            .commuting_pairs
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let gens: Vec<&str> = doc.generators.iter().map(String::as_str).collect();
        Self::new(&gens, &pairs)
    }

    pub fn to_doc(&self) -> PresentationDoc {
        let mut pairs = Vec::new();
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                if self.commute[i][j] {
                    pairs.push([self.generators[i].clone(), self.generators[j].clone()]);
                }
            }
        }
        PresentationDoc {
            generators: self.generators.clone(),
            commuting_pairs: pairs,
        }
    }

    /// The free group on the given generators.
    pub fn free(generators: &[&str]) -> Self {
        Self::new(generators, &[]).expect("valid generator names")
    }

    /// ⟨x, y, z | [x, y]⟩, whose Salvetti complex is a torus wedge a circle.
    pub fn tree_of_flats() -> Self {
        Self::new(&["x", "y", "z"], &[("x", "y")]).expect("valid presentation")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.commute[a][b]
    }

    pub fn generator_index(&self, name: &str) -> Result<usize, RaagError> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| RaagError::UnknownGenerator(name.to_string()))
    }

    /// All letters in shortlex order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.rank()).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
    }

    pub fn generator(&self, name: &str) -> Result<GroupElement, RaagError> {
        Ok(self.element(&[Letter::new(self.generator_index(name)?, false)]))
    }

    /// Freely and commutatively reduces a word: each letter travels left past
    /// letters it commutes with and cancels against an inverse it meets.
    pub fn reduce(&self, word: &[Letter]) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::with_capacity(word.len());
        for &l in word {
            self.push_reduced(&mut out, l);
        }
        out
    }

    fn push_reduced(&self, out: &mut Vec<Letter>, l: Letter) {
        for j in (0..out.len()).rev() {
            let u = out[j];
            if u.generator() == l.generator() {
                if u == l.inverse() {
                    out.remove(j);
                    return;
                }
                break;
            }
            if !self.commutes(u.generator(), l.generator()) {
                break;
            }
        }
        out.push(l);
    }

    /// Reorders a reduced word into the shortlex-least word among its
    /// commutation shuffles by repeatedly taking the least letter that can
    /// be moved to the front.
    pub fn shortlex(&self, reduced: &[Letter]) -> Vec<Letter> {
        let mut rest = reduced.to_vec();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for i in 0..rest.len() {
                let free = rest[..i]
                    .iter()
                    .all(|u| self.commutes(u.generator(), rest[i].generator()));
                if free && best.is_none_or(|b| rest[i] < rest[b]) {
                    best = Some(i);
                }
            }
            out.push(rest.remove(best.expect("the first letter is always free")));
        }
        out
    }

    pub fn normal_form(&self, word: &[Letter]) -> Vec<Letter> {
        self.shortlex(&self.reduce(word))
    }

    pub fn element(&self, word: &[Letter]) -> GroupElement {
        GroupElement {
            word: word.to_vec(),
            normal: self.normal_form(word),
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let word: Vec<Letter> = g.normal.iter().chain(&h.normal).copied().collect();
        self.element(&word)
    }

    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a GroupElement>) -> GroupElement {
        let word: Vec<Letter> = factors
            .into_iter()
            .flat_map(|f| f.normal.iter().copied())
            .collect();
        self.element(&word)
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let word: Vec<Letter> = g.normal.iter().rev().map(|l| l.inverse()).collect();
        self.element(&word)
    }

    pub fn power(&self, g: &GroupElement, k: i64) -> GroupElement {
        let base = if k < 0 { self.inverse(g) } else { g.clone() };
        let word: Vec<Letter> = (0..k.unsigned_abs())
            .flat_map(|_| base.normal.iter().copied())
            .collect();
        self.element(&word)
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.product([g, h, &self.inverse(g)])
    }

    /// Parses words such as `"x y⁻¹ z"`, `"x^3 z x^-3"`, `"zxz⁻¹"` or `"e"`.
    pub fn parse(&self, text: &str) -> Result<GroupElement, RaagError> {
        Ok(self.element(&self.parse_word(text)?))
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>, RaagError> {
        let chars: Vec<char> = text.chars().collect();
        let mut word = Vec::new();
        let mut i = 0;
        let err = |pos: usize, msg: &str| {
            RaagError::Parse(format!("{msg} at column {} in {text:?}", pos + 1))
        };
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '·' || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            let rest: String = chars[i..].iter().collect();
            let matched = self
                .generators
                .iter()
                .enumerate()
                .filter(|(_, g)| rest.starts_with(g.as_str()))
                .max_by_key(|(_, g)| g.len());
            let (gen, width) = match matched {
                Some((k, g)) => (Some(k), g.chars().count()),
                None => {
                    let ident = IDENTITY_TOKENS.iter().find(|t| rest.starts_with(**t));
                    match ident {
                        Some(t) => (None, t.chars().count()),
                        None => {
                            let token: String = chars[i..]
                                .iter()
                                .take_while(|c| c.is_alphanumeric() || **c == '_')
                                .collect();
                            if token.is_empty() {
                                return Err(err(i, &format!("unexpected character {c:?}")));
                            }
                            return Err(RaagError::UnknownGenerator(token));
                        }
                    }
                }
            };
            i += width;
            let (exp, used) = parse_exponent(&chars[i..]).map_err(|m| err(i, m))?;
            i += used;
            if let Some(g) = gen {
                let l = Letter::new(g, exp < 0);
                word.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
            }
        }
        Ok(word)
    }

    /// Renders a word with runs collapsed into powers: `"z x² y⁻¹"`, or
    /// `"e"` for the empty word.
    pub fn render_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let l = word[i];
            let run = word[i..].iter().take_while(|&&u| u == l).count();
            let mut s = self.generators[l.generator()].clone();
            if l.is_inverse() {
                s.push('⁻');
            }
            if run > 1 || l.is_inverse() {
                s.push_str(&superscript(run));
            }
            parts.push(s);
            i += run;
        }
        parts.join(" ")
    }

    /// ASCII rendering: `"z x^2 y^-1"`.
    pub fn render_word_ascii(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let l = word[i];
            let run = word[i..].iter().take_while(|&&u| u == l).count() as i64;
            let exp = if l.is_inverse() { -run } else { run };
            let name = &self.generators[l.generator()];
            parts.push(if exp == 1 {
                name.clone()
            } else {
                format!("{name}^{exp}")
            });
            i += run as usize;
        }
        parts.join(" ")
    }

    pub fn render(&self, g: &GroupElement) -> String {
        self.render_word(&g.normal)
    }
}

fn superscript(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|d| SUPERSCRIPT_DIGITS[d.to_digit(10).unwrap() as usize])
        .collect()
}

/// Reads an optional exponent (`^3`, `^-2`, `⁻¹`, `²`); returns the value and
/// the number of characters consumed.
fn parse_exponent(chars: &[char]) -> Result<(i64, usize), &'static str> {
    let mut i = 0;
    if chars.first() == Some(&'^') {
        i += 1;
        let neg = matches!(chars.get(i), Some('-') | Some('−'));
        if neg {
            i += 1;
        }
        let digits: String = chars[i..]
            .iter()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if digits.is_empty() {
            return Err("expected digits after '^'");
        }
        i += digits.len();
        let v: i64 = digits.parse().map_err(|_| "exponent out of range")?;
        return Ok((if neg { -v } else { v }, i));
    }
    let neg = chars.first() == Some(&'⁻');
    if neg {
        i += 1;
    }
    let mut v: i64 = 0;
    let start = i;
    while let Some(d) = chars
        .get(i)
        .and_then(|c| SUPERSCRIPT_DIGITS.iter().position(|s| s == c))
    {
        v = v
            .checked_mul(10)
            .and_then(|v| v.checked_add(d as i64))
            .ok_or("exponent out of range")?;
        i += 1;
    }
    if i == start {
        if neg {
            return Err("expected superscript digits after '⁻'");
        }
        return Ok((1, 0));
    }
    Ok((if neg { -v } else { v }, i))
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            self.generator(),
            if self.is_inverse() { "⁻" } else { "" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tof() -> Presentation {
        Presentation::tree_of_flats()
    }

    #[test]
    fn commuting_conjugation_collapses() {
        let p = tof();
        assert_eq!(p.render(&p.parse("x y x⁻¹").unwrap()), "y");
    }

    #[test]
    fn inverse_pair_is_identity() {
        let p = Presentation::free(&["a", "b"]);
        let g = p.parse("a a⁻¹").unwrap();
        assert!(g.is_identity());
        assert_eq!(p.render(&g), "e");
    }

    #[test]
    fn shortlex_orders_commuting_letters() {
        let p = Presentation::new(&["x", "y"], &[("x", "y")]).unwrap();
        let g = p.parse("y x").unwrap();
        assert_eq!(p.render(&g), "x y");
        let h = p.multiply(&p.parse("x").unwrap(), &p.parse("y").unwrap());
        assert_eq!(p.render(&h), "x y");
        assert_eq!(h.length(), 2);
    }

    #[test]
    fn free_reduction_in_products() {
        let p = Presentation::free(&["a", "b"]);
        let g = p.multiply(&p.parse("a b").unwrap(), &p.parse("b⁻¹ a").unwrap());
        assert_eq!(p.render(&g), "a²");
        assert_eq!(g.length(), 2);
    }

    #[test]
    fn parser_accepts_both_exponent_styles() {
        let p = tof();
        let a = p.parse("x^3 z x^3 z^-1").unwrap();
        let b = p.parse("x³ z x³ z⁻¹").unwrap();
        assert_eq!(a, b);
        assert_eq!(p.render_word_ascii(a.letters()), "x^3 z x^3 z^-1");
        assert_eq!(p.parse("zxz⁻¹").unwrap(), p.parse("z x z^-1").unwrap());
        assert!(matches!(
            p.parse("x w"),
            Err(RaagError::UnknownGenerator(_))
        ));
        assert!(matches!(p.parse("x^"), Err(RaagError::Parse(_))));
    }

    #[test]
    fn self_commutation_is_rejected() {
        assert!(Presentation::new(&["a"], &[("a", "a")]).is_err());
    }
}
