use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::poly::{ExactPoly, MultiPoly, Rational, TermRecord};

/// The input of the pipeline: `f = F^p / G^q` with `deg F = q d`, `deg G = p d`
/// and `gcd(p, q) = 1`.
#[derive(Clone, Debug)]
pub struct PencilSpec {
    f_exact: ExactPoly,
    g_exact: ExactPoly,
    f: MultiPoly,
    g: MultiPoly,
    p: u32,
    q: u32,
    d: u32,
}

/// On-disk form of a [`PencilSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub p: u32,
    pub q: u32,
    pub d: u32,
    #[serde(rename = "F")]
    pub f: Vec<TermRecord>,
    #[serde(rename = "G")]
    pub g: Vec<TermRecord>,
}

impl PencilSpec {
    pub fn new(f: ExactPoly, g: ExactPoly, p: u32, q: u32, d: u32) -> Result<Self> {
        if p == 0 || q == 0 || d == 0 {
            return Err(Error::InvalidSpec("p, q and d must be positive".into()));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidSpec(format!("gcd({p}, {q}) != 1")));
        }
        if f.degree() != q * d {
            return Err(Error::InvalidSpec(format!(
                "deg F = {} but q d = {}",
                f.degree(),
                q * d
            )));
        }
        if g.degree() != p * d {
            return Err(Error::InvalidSpec(format!(
                "deg G = {} but p d = {}",
                g.degree(),
                p * d
            )));
        }
        if f.terms().next().is_none() || g.terms().next().is_none() {
            return Err(Error::InvalidSpec("F and G must be nonzero".into()));
        }
        Ok(Self {
            f: f.to_multipoly(),
            g: g.to_multipoly(),
            f_exact: f,
            g_exact: g,
            p,
            q,
            d,
        })
    }

    pub fn from_file(file: &SpecFile) -> Result<Self> {
        Self::new(
            ExactPoly::from_records(&file.f)?,
            ExactPoly::from_records(&file.g)?,
            file.p,
            file.q,
            file.d,
        )
    }

    pub fn to_file(&self) -> SpecFile {
        SpecFile {
            p: self.p,
            q: self.q,
            d: self.d,
            f: self.f_exact.to_records(),
            g: self.g_exact.to_records(),
        }
    }

    /// A dense random instance with small dyadic Gaussian-rational coefficients.
    pub fn random<R: Rng>(rng: &mut R, p: u32, q: u32, d: u32) -> Result<Self> {
        let f = random_form(rng, q * d);
        let g = random_form(rng, p * d);
        Self::new(f, g, p, q, d)
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    pub fn g(&self) -> &MultiPoly {
        &self.g
    }

    pub fn f_exact(&self) -> &ExactPoly {
        &self.f_exact
    }

    pub fn g_exact(&self) -> &ExactPoly {
        &self.g_exact
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Degree `pqd` of every fiber.
    pub fn fiber_degree(&self) -> usize {
        (self.p * self.q * self.d) as usize
    }

    /// Expected number of base points, `(qd)(pd)`.
    pub fn base_point_count(&self) -> usize {
        (self.q * self.d * self.p * self.d) as usize
    }

    /// `f = F^p / G^q` at a projective point.
    pub fn value(&self, pt: [Complex64; 3]) -> Complex64 {
        self.f.evaluate(pt).powu(self.p) / self.g.evaluate(pt).powu(self.q)
    }

    /// Canonical text of the instance, stable under term reordering.
    pub fn canonical_text(&self) -> String {
        format!(
            "p={};q={};d={};F={};G={}",
            self.p, self.q, self.d, self.f_exact, self.g_exact
        )
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn random_form<R: Rng>(rng: &mut R, degree: u32) -> ExactPoly {
    let mut terms = Vec::new();
    for i in 0..=degree {
        for j in 0..=degree - i {
            let k = degree - i - j;
            let re: Rational = Ratio::new(rng.gen_range(-64i64..=64), 32);
            let im: Rational = Ratio::new(rng.gen_range(-64i64..=64), 32);
            terms.push(([i, j, k], (re, im)));
        }
    }
    ExactPoly::new(degree, terms).expect("exponents sum to the degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degrees_are_validated() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_form(&mut rng, 3);
        let g = random_form(&mut rng, 2);
        assert!(PencilSpec::new(f.clone(), g.clone(), 1, 1, 3).is_err());
        assert!(PencilSpec::new(f.clone(), f.clone(), 2, 2, 1).is_err());
        assert!(PencilSpec::new(g, f, 3, 2, 1).is_ok());
    }

    #[test]
    fn file_round_trip_preserves_hash() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = PencilSpec::random(&mut rng, 1, 1, 3).unwrap();
        let back = PencilSpec::from_file(&s.to_file()).unwrap();
        assert_eq!(s.hash(), back.hash());
    }
}
