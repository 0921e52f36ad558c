use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Largest supported degree; points are stored as bytes.
pub const MAX_DEGREE: usize = 256;

/// A permutation of `0..degree`.
///
/// Permutations act on the left and compose right to left:
/// `(a * b).apply(x) == a.apply(b.apply(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u8]>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE);
        Perm {
            images: (0..degree).map(|i| i as u8).collect(),
        }
    }

    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n > MAX_DEGREE {
            return Err(Error::TooLarge {
                what: "permutation degree",
                size: n as u128,
                bound: MAX_DEGREE as u128,
            });
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Perm {
            images: images.iter().map(|&x| x as u8).collect(),
        })
    }

    /// Builds a permutation from a point map without validation.
    pub(crate) fn from_fn(degree: usize, f: impl Fn(usize) -> usize) -> Self {
        Perm {
            images: (0..degree).map(|x| f(x) as u8).collect(),
        }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&x| x as usize)
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[u8] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    #[inline]
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        let a = &self.images;
        Perm {
            images: other.images.iter().map(|&x| a[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Perm {
            images: inv.into_boxed_slice(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn pow(&self, mut k: u64) -> Perm {
        let mut result = Perm::identity(self.degree());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        result
    }

    /// Order of the permutation (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut ord = 1u64;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    /// `s * self * s⁻¹`.
    pub fn conjugate_by(&self, s: &Perm) -> Perm {
        // (s self s^-1)(s(x)) = s(self(x))
        let mut images = vec![0u8; self.degree()];
        for x in 0..self.degree() {
            images[s.apply(x)] = s.images[self.apply(x)];
        }
        Perm {
            images: images.into_boxed_slice(),
        }
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &Perm, b: &Perm) -> Perm {
        a.inverse()
            .compose(&b.inverse())
            .compose(a)
            .compose(b)
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.apply(x) == x
    }

    pub fn is_fixed_point_free(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i != x as usize)
    }
}

impl Mul for &Perm {
    type Output = Perm;

    fn mul(self, rhs: &Perm) -> Perm {
        self.compose(rhs)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl fmt::Display for Perm {
    /// Cycle notation, identity printed as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut any = false;
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_applies_right_first() {
        let a = Perm::from_images(&[1, 2, 0]).unwrap();
        let b = Perm::from_images(&[0, 2, 1]).unwrap();
        let ab = &a * &b;
        for x in 0..3 {
            assert_eq!(ab.apply(x), a.apply(b.apply(x)));
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(&[0, 0, 1]).is_err());
        assert!(Perm::from_images(&[0, 3, 1]).is_err());
    }

    #[test]
    fn inverse_order_and_conjugation() {
        let c = Perm::from_images(&[1, 2, 3, 0]).unwrap();
        assert!(c.compose(&c.inverse()).is_identity());
        assert_eq!(c.order(), 4);
        assert!(c.pow(4).is_identity());
        let s = Perm::from_images(&[1, 0, 2, 3]).unwrap();
        let conj = c.conjugate_by(&s);
        assert_eq!(conj, s.compose(&c).compose(&s.inverse()));
        assert_eq!(format!("{c}"), "(0,1,2,3)");
    }
}
