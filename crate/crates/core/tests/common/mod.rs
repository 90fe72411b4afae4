#![allow(dead_code)]

use fuchsian_roots::nielsen::NielsenMove;
use fuchsian_roots::psl2::{GeneratorPair, Matrix2};
use fuchsian_roots::scalar::Scalar;
use fuchsian_roots::word::Word;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

pub fn s(text: &str) -> Scalar {
    text.parse().unwrap()
}

pub fn m(a: i64, b: i64, c: i64, d: i64) -> Matrix2 {
    Matrix2::from_ints(a, b, c, d).unwrap()
}

pub fn rational(rng: &mut impl Rng, num: i64, den: i64) -> Scalar {
    Scalar::from_fraction(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// A random element of SL(2,Q): `a`, `b`, `c` drawn, `d = (1 + bc) / a`.
pub fn sl2q(rng: &mut impl Rng) -> Matrix2 {
    loop {
        let a = rational(rng, 9, 4);
        if a.is_zero() {
            continue;
        }
        let b = rational(rng, 9, 4);
        let c = rational(rng, 9, 4);
        let d = (Scalar::one() + &b * &c) / a.clone();
        return Matrix2::new(a, b, c, d).unwrap();
    }
}

pub fn pair(rng: &mut impl Rng) -> GeneratorPair {
    GeneratorPair::from_parts(sl2q(rng), sl2q(rng), [Word::a(), Word::b()]).unwrap()
}

pub fn random_move(rng: &mut impl Rng) -> NielsenMove {
    NielsenMove::ALL[rng.gen_range(0..NielsenMove::ALL.len())]
}

pub fn first_example() -> GeneratorPair {
    GeneratorPair::new(&m(44, 61, 31, 43), &m(3, 4, 2, 3)).unwrap()
}

pub fn second_example() -> GeneratorPair {
    GeneratorPair::new(&m(26, -1, 1, 0), &Matrix2::parse(["0", "2", "-1/2", "53"]).unwrap()).unwrap()
}

/// `(A, B, R, S)` with `R^2 = A`, `S^3 = B`.
pub fn root_example() -> (Matrix2, Matrix2, Matrix2, Matrix2) {
    (
        Matrix2::parse(["-1", "28*sqrt(6)+70", "28*sqrt(6)-70", "195"]).unwrap(),
        m(2627796, -19043, 19043, -138),
        Matrix2::parse(["0", "2*sqrt(6)+5", "2*sqrt(6)-5", "14"]).unwrap(),
        m(138, -1, 1, 0),
    )
}

pub fn triple_strings<T: std::fmt::Display>(seq: &[fuchsian_roots::nielsen::TraceTriple<T>]) -> Vec<String> {
    seq.iter().map(|t| t.to_string()).collect()
}
