//! The two independent gamma computations, their inversion, homogeneity
//! exponents, and the change-of-variable bookkeeping for monomial data.
//!
//! Route one ([`gamma_from_exponents`]) evaluates per-case closed-form
//! rational functions of the class exponents. Route two ([`derive_gamma`])
//! reconstructs them from first principles: solve the chain
//! h_i / h_{i-1} = nu / p_i with nu^{n+1} = p_0 ... p_n under the case's
//! h-relations, integrate dt/dz = nu, and read gamma off the designated
//! components as  gamma = -2 m_j (n+1) / (n+1 + sum k)  where m_j is the
//! z-exponent of h_j. The two routes agreeing exactly on random data is the
//! module's central test.
//!
//! The (5, 1) closed form carries the prefactor 4 on gamma0 (tabulations of
//! it sometimes halve it); the chain derivation pins it, and 4 is also what
//! the block-swap symmetry (5,1) <-> (1,5) of the corrected table requires.

use crate::error::{Error, Result};
use crate::holodata::case::CaseSpec;
use crate::holodata::monomial::{rat, CoeffProduct, GammaPair, Monomial, MonomialData, Rat};
use num_traits::{One, Zero};

/// Numerator coefficient triples (gamma0, gamma1) per case, applied to the
/// class exponents (kA, kB, kC); the denominator is always
/// sum(mult_i * k_i) + (n+1).
fn numerators(case: &CaseSpec) -> ([i64; 3], [i64; 3]) {
    match (case.l1, case.l2) {
        (4, 0) => ([3, -2, -1], [1, 2, -3]),
        (5, 0) => ([4, -2, -2], [2, 4, -6]),
        (1, 4) => ([6, -4, -2], [2, 2, -4]),
        (1, 5) => ([8, -4, -4], [4, 4, -8]),
        (2, 2) => ([-2, -1, 3], [2, -3, 1]),
        (2, 3) => ([-4, -2, 6], [2, -4, 2]),
        (3, 2) => ([-2, -2, 4], [4, -6, 2]),
        (3, 3) => ([-4, -4, 8], [4, -8, 4]),
        (4, 1) => ([6, -4, -2], [2, 2, -4]),
        (5, 1) => ([8, -4, -4], [4, 4, -8]),
        _ => unreachable!("constructed CaseSpec rows are exhaustive"),
    }
}

/// Closed-form gamma for monomial data: exact rational functions of the
/// class exponents. The denominator is a positive multiple of
/// (n+1) + sum k_i, hence nonzero under the data invariant.
pub fn gamma_from_exponents(case: &CaseSpec, data: &MonomialData) -> GammaPair {
    let ks = data.class_exponents(case);
    let mult = case.class_multiplicities();
    let (n0, n1) = numerators(case);
    let denom: Rat = ks
        .iter()
        .zip(&mult)
        .map(|(k, &m)| k * rat(m as i64, 1))
        .sum::<Rat>()
        + rat(case.n_plus_1 as i64, 1);
    let dot = |coef: [i64; 3]| -> Rat {
        ks.iter()
            .zip(coef)
            .map(|(k, c)| k * rat(c, 1))
            .sum::<Rat>()
    };
    GammaPair::new(dot(n0) / denom.clone(), dot(n1) / denom)
}

/// First-principles gamma: solve the h-chain and the change of variable and
/// read the log coefficients off the designated components.
pub fn derive_gamma(case: &CaseSpec, data: &MonomialData) -> Result<GammaPair> {
    let m = solve_h_exponents(case, data)?;
    let total = data.total_degree();
    let n1 = rat(case.n_plus_1 as i64, 1);
    let scale = n1.clone() / (total + n1);
    let gamma_of = |idx: usize| -> Rat { -rat(2, 1) * m[idx].clone() * scale.clone() };
    Ok(GammaPair::new(gamma_of(case.w_index), gamma_of(case.v_index)))
}

/// z-exponents of the h_i chain, with every h-relation verified exactly.
fn solve_h_exponents(case: &CaseSpec, data: &MonomialData) -> Result<Vec<Rat>> {
    let m = case.solve_exponent_chain(data.exponents())?;
    for rel in &case.h_relations {
        let total: Rat = rel.iter().map(|&i| m[i].clone()).sum();
        if !total.is_zero() {
            return Err(Error::internal(format!(
                "h-relation {rel:?} failed to close on valid data"
            )));
        }
    }
    Ok(m)
}

/// Everything the change of variable t = ∫ nu dz produces for monomial data.
///
/// Coefficient products are expressed over the class representatives (the
/// printed convention, e.g. c0^{1/2} c1^{1/4} c3^{1/4} for the (2,2) row).
/// When coefficients differ inside a class they enter through the class's
/// geometric mean — the normalization under which the h-relations close on
/// the coefficient level; class products, hence nu and t, are unchanged.
#[derive(Debug, Clone)]
pub struct ChangeOfVariable {
    /// nu = (p_0 ... p_n)^{1/(n+1)}.
    pub nu: Monomial,
    /// t(z) = nu_coeff z^{nu_exp + 1} / (nu_exp + 1).
    pub t_of_z: Monomial,
    /// The h_i, one per index.
    pub h: Vec<Monomial>,
    /// Pooled per-index coefficient values the products evaluate against.
    pub pooled_coefficients: Vec<f64>,
    /// (K_w, K_v): the log|t|-free constants contributed by inverting t(z).
    pub k_constants: (f64, f64),
    /// (alpha_w, alpha_v): full O(1) constants, K_i - 2 log|h_i coefficient|.
    pub alpha_constants: (f64, f64),
    pub gamma: GammaPair,
}

/// Exact monomials for nu, t(z) and every h_i, plus the asymptotic constants.
/// Fails when sum k = -(n+1) (the change of variable degenerates to a log).
pub fn change_of_variable(case: &CaseSpec, data: &MonomialData) -> Result<ChangeOfVariable> {
    let n1 = case.n_plus_1;
    let total = data.total_degree();
    let nu_exp = total.clone() / rat(n1 as i64, 1);
    let t_exp = nu_exp.clone() + Rat::one();
    if t_exp.is_zero() {
        // unreachable through MonomialData's invariant, kept for direct callers
        return Err(Error::invalid(
            "sum of exponents equals -(n+1): change of variable degenerates",
        ));
    }

    // Geometric class means, stored at every index of the class; products
    // within a class are preserved.
    let mut pooled = vec![0.0; n1];
    for class in &case.p_classes {
        let mean = class
            .iter()
            .map(|&i| data.coefficients()[i])
            .product::<f64>()
            .powf(1.0 / class.len() as f64);
        for &i in class {
            pooled[i] = mean;
        }
    }

    // Coefficient products live on the class representatives.
    let rep = |i: usize| case.p_classes[case.class_of(i)][0];
    let mut nu_coeff = CoeffProduct::one(n1);
    for class in &case.p_classes {
        nu_coeff.powers[class[0]] = rat(class.len() as i64, n1 as i64);
    }
    let nu = Monomial {
        scalar: Rat::one(),
        coeff: nu_coeff.clone(),
        exponent: nu_exp.clone(),
    };
    let t_of_z = Monomial {
        scalar: t_exp.clone().recip(),
        coeff: nu_coeff.clone(),
        exponent: t_exp.clone(),
    };

    // h-chain for both the exponents and the coefficient products.
    let m = solve_h_exponents(case, data)?;
    let mut off = vec![CoeffProduct::one(n1); n1];
    for i in 1..n1 {
        let mut step = nu_coeff.clone();
        step.powers[rep(i)] -= Rat::one();
        off[i] = off[i - 1].mul(&step);
    }
    let rel = &case.h_relations[0];
    let base = match rel.len() {
        1 => off[rel[0]].pow(&rat(-1, 1)),
        2 => off[rel[0]].mul(&off[rel[1]]).pow(&rat(-1, 2)),
        _ => return Err(Error::internal("unsupported h-relation arity")),
    };
    let hc: Vec<CoeffProduct> = off.iter().map(|o| base.mul(o)).collect();
    for rel in &case.h_relations {
        let prod = rel
            .iter()
            .fold(CoeffProduct::one(n1), |acc, &i| acc.mul(&hc[i]));
        if !prod.is_one() {
            return Err(Error::internal(format!(
                "h-relation {rel:?} failed to close on the coefficients"
            )));
        }
    }
    let h: Vec<Monomial> = m
        .iter()
        .zip(&hc)
        .map(|(e, c)| Monomial {
            scalar: Rat::one(),
            coeff: c.clone(),
            exponent: e.clone(),
        })
        .collect();

    let gamma = derive_gamma(case, data)?;
    let (g0, g1) = gamma.to_f64();
    let t_coeff_value = t_of_z.coefficient_value(&pooled);
    let kw = -g0 * t_coeff_value.abs().ln();
    let kv = -g1 * t_coeff_value.abs().ln();
    let hw = h[case.w_index].coefficient_value(&pooled);
    let hv = h[case.v_index].coefficient_value(&pooled);
    Ok(ChangeOfVariable {
        nu,
        t_of_z,
        h,
        pooled_coefficients: pooled,
        k_constants: (kw, kv),
        alpha_constants: (kw - 2.0 * hw.abs().ln(), kv - 2.0 * hv.abs().ln()),
        gamma,
    })
}

/// Invert gamma: the unique class exponents (kA, kB, kC) with the prescribed
/// total degree. Exact 3x3 rational solve; a singular system (possible only
/// for special gamma values) is reported as an internal error.
pub fn exponents_from_gamma(
    case: &CaseSpec,
    gamma: &GammaPair,
    total_degree: &Rat,
) -> Result<Vec<Rat>> {
    let n1 = rat(case.n_plus_1 as i64, 1);
    if *total_degree <= -n1.clone() {
        return Err(Error::invalid(format!(
            "total degree {total_degree} must exceed -(n+1) = -{}",
            case.n_plus_1
        )));
    }
    let (num0, num1) = numerators(case);
    let mult = case.class_multiplicities();
    // Rows: (N0 - g0 mult) k = g0 (n+1); (N1 - g1 mult) k = g1 (n+1); mult k = total.
    let mut a = [[Rat::zero(), Rat::zero(), Rat::zero()], [Rat::zero(), Rat::zero(), Rat::zero()], [
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
    ]];
    let mut rhs = [
        gamma.gamma0.clone() * n1.clone(),
        gamma.gamma1.clone() * n1.clone(),
        total_degree.clone(),
    ];
    for j in 0..3 {
        a[0][j] = rat(num0[j], 1) - gamma.gamma0.clone() * rat(mult[j] as i64, 1);
        a[1][j] = rat(num1[j], 1) - gamma.gamma1.clone() * rat(mult[j] as i64, 1);
        a[2][j] = rat(mult[j] as i64, 1);
    }
    // Gaussian elimination over the rationals.
    for col in 0..3 {
        let pivot = (col..3)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::internal("singular exponent system"))?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..3 {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone() / a[col][col].clone();
                for c in col..3 {
                    let v = a[col][c].clone() * factor.clone();
                    a[r][c] -= v;
                }
                let v = rhs[col].clone() * factor;
                rhs[r] -= v;
            }
        }
    }
    Ok((0..3).map(|i| rhs[i].clone() / a[i][i].clone()).collect())
}

/// Homogeneity data for a full exponent vector:
/// a = (n+1)/(n+1 + sum k), e_i = -a (k_1 + ... + k_i) + i (1 - a), e_0 = 0.
pub fn homogeneity_exponents(n_plus_1: usize, k: &[Rat]) -> Result<(Rat, Vec<Rat>)> {
    if k.len() != n_plus_1 {
        return Err(Error::invalid(format!(
            "expected {n_plus_1} exponents, got {}",
            k.len()
        )));
    }
    let n1 = rat(n_plus_1 as i64, 1);
    let total: Rat = k.iter().sum();
    let denom = n1.clone() + total;
    if denom.is_zero() {
        return Err(Error::invalid("sum k = -(n+1): homogeneity degenerates"));
    }
    let a = n1 / denom;
    let mut e = vec![Rat::zero(); n_plus_1];
    let mut partial = Rat::zero();
    for i in 1..n_plus_1 {
        partial += k[i].clone();
        e[i] = -a.clone() * partial.clone() + rat(i as i64, 1) * (Rat::one() - a.clone());
    }
    Ok((a, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holodata::case::{case_spec, CASES};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn data(case: &CaseSpec, ks: [(i64, i64); 3]) -> MonomialData {
        MonomialData::from_class_exponents(
            case,
            &[rat(ks[0].0, ks[0].1), rat(ks[1].0, ks[1].1), rat(ks[2].0, ks[2].1)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn cp3_gamma() {
        let case = case_spec(4, 0).unwrap();
        let d = data(&case, [(0, 1), (-1, 1), (-1, 1)]);
        let g = gamma_from_exponents(&case, &d);
        assert_eq!(g, GammaPair::new(rat(3, 1), rat(1, 1)));
        assert_eq!(derive_gamma(&case, &d).unwrap(), g);
    }

    #[test]
    fn a4_gamma() {
        let case = case_spec(4, 0).unwrap();
        let d = data(&case, [(1, 1), (0, 1), (0, 1)]);
        let g = gamma_from_exponents(&case, &d);
        assert_eq!(g, GammaPair::new(rat(3, 5), rat(1, 5)));
        assert_eq!(derive_gamma(&case, &d).unwrap(), g);
    }

    #[test]
    fn zero_exponents_zero_gamma() {
        for &(l1, l2) in &CASES {
            let case = case_spec(l1, l2).unwrap();
            let d = data(&case, [(0, 1), (0, 1), (0, 1)]);
            let g = gamma_from_exponents(&case, &d);
            assert!(g.gamma0.is_zero() && g.gamma1.is_zero(), "case ({l1},{l2})");
        }
    }

    #[test]
    fn cp4_first_principles() {
        let case = case_spec(5, 0).unwrap();
        let d = data(&case, [(0, 1), (-1, 1), (-1, 1)]);
        assert_eq!(
            derive_gamma(&case, &d).unwrap(),
            GammaPair::new(rat(4, 1), rat(2, 1))
        );
    }

    #[test]
    fn p13_first_principles() {
        let case = case_spec(2, 2).unwrap();
        let d = data(&case, [(-2, 3), (-1, 1), (-2, 3)]);
        assert_eq!(
            derive_gamma(&case, &d).unwrap(),
            GammaPair::new(rat(1, 3), rat(1, 1))
        );
    }

    fn random_admissible(case: &CaseSpec, rng: &mut StdRng) -> MonomialData {
        loop {
            let ks: Vec<Rat> = (0..3)
                .map(|_| rat(rng.random_range(-12..=24), rng.random_range(1..=12)))
                .collect();
            let clipped: Vec<Rat> = ks
                .into_iter()
                .map(|k| if k < rat(-1, 1) { rat(-1, 1) } else { k })
                .collect();
            if let Ok(d) = MonomialData::from_class_exponents(case, &clipped, None) {
                return d;
            }
        }
    }

    #[test]
    fn dual_route_agreement_random() {
        let mut rng = StdRng::seed_from_u64(0x51ab);
        for &(l1, l2) in &CASES {
            let case = case_spec(l1, l2).unwrap();
            for _ in 0..100 {
                let d = random_admissible(&case, &mut rng);
                let g1 = gamma_from_exponents(&case, &d);
                let g2 = derive_gamma(&case, &d).unwrap();
                assert_eq!(g1, g2, "case ({l1},{l2}) data {:?}", d.exponents());
            }
        }
    }

    #[test]
    fn round_trip_exponents() {
        let mut rng = StdRng::seed_from_u64(42);
        for &(l1, l2) in &CASES {
            let case = case_spec(l1, l2).unwrap();
            for _ in 0..50 {
                let d = random_admissible(&case, &mut rng);
                let g = gamma_from_exponents(&case, &d);
                let k = exponents_from_gamma(&case, &g, &d.total_degree()).unwrap();
                assert_eq!(k, d.class_exponents(&case), "case ({l1},{l2})");
            }
        }
    }

    #[test]
    fn inversion_example() {
        // (2,2) with gamma = (1/3, 1) and total degree -3 recovers P(1,3).
        let case = case_spec(2, 2).unwrap();
        let g = GammaPair::new(rat(1, 3), rat(1, 1));
        let k = exponents_from_gamma(&case, &g, &rat(-3, 1)).unwrap();
        assert_eq!(k, vec![rat(-2, 3), rat(-1, 1), rat(-2, 3)]);
        // gamma = 0, total 0 gives k = 0
        let g = GammaPair::new(rat(0, 1), rat(0, 1));
        let k = exponents_from_gamma(&case, &g, &rat(0, 1)).unwrap();
        assert!(k.iter().all(Rat::is_zero));
    }

    #[test]
    fn change_of_variable_cp3() {
        let case = case_spec(4, 0).unwrap();
        let d = data(&case, [(0, 1), (-1, 1), (-1, 1)]);
        let cov = change_of_variable(&case, &d).unwrap();
        assert_eq!(cov.nu.exponent, rat(-3, 4));
        assert_eq!(cov.t_of_z.exponent, rat(1, 4));
        assert_eq!(cov.t_of_z.scalar, rat(4, 1));
        let tval = cov.t_of_z.coefficient_value(d.coefficients());
        assert!((tval - 4.0).abs() < 1e-12);
    }

    #[test]
    fn change_of_variable_22_matches_worked_example() {
        // (2,2): h3 = c0^{1/4} c1^{1/8} c3^{-3/8} z^{(2k0+k1-3k3)/8} and
        // h0 = c0^{-1/4} c1^{3/8} c3^{-1/8} z^{(-2k0+3k1-k3)/8} when c2 = c0.
        let case = case_spec(2, 2).unwrap();
        let d = data(&case, [(-2, 3), (-1, 1), (-2, 3)]);
        let cov = change_of_variable(&case, &d).unwrap();
        // (-2k0 + 3k1 - k3)/8 with (k0,k1,k3) = (-2/3, -1, -2/3) = -1/8
        assert_eq!(cov.h[0].exponent, rat(-1, 8));
        // (2k0 + k1 - 3k3)/8 = (-4/3 - 1 + 2)/8 = -1/24
        assert_eq!(cov.h[3].exponent, rat(-1, 24));
        // nu = c0^{1/2} c1^{1/4} c3^{1/4} z^{...} over the class representatives
        assert_eq!(cov.nu.coeff.powers[0], rat(1, 2));
        assert_eq!(cov.nu.coeff.powers[1], rat(1, 4));
        assert_eq!(cov.nu.coeff.powers[3], rat(1, 4));
        // h3 = c0^{1/4} c1^{1/8} c3^{-3/8}, h0 = c0^{-1/4} c1^{3/8} c3^{-1/8}
        let h3 = &cov.h[3].coeff.powers;
        assert_eq!(h3[0], rat(1, 4));
        assert_eq!(h3[1], rat(1, 8));
        assert_eq!(h3[3], rat(-3, 8));
        let h0 = &cov.h[0].coeff.powers;
        assert_eq!(h0[0], rat(-1, 4));
        assert_eq!(h0[1], rat(3, 8));
        assert_eq!(h0[3], rat(-1, 8));
    }

    #[test]
    fn change_of_variable_trivial_data() {
        let case = case_spec(4, 0).unwrap();
        let d = data(&case, [(0, 1), (0, 1), (0, 1)]);
        let cov = change_of_variable(&case, &d).unwrap();
        assert!(cov.nu.exponent.is_zero());
        assert_eq!(cov.t_of_z.exponent, rat(1, 1));
        for h in &cov.h {
            assert!(h.exponent.is_zero());
            assert!((h.coefficient_value(&cov.pooled_coefficients) - 1.0).abs() < 1e-14);
        }
        assert_eq!(cov.k_constants, (0.0, 0.0));
        assert_eq!(cov.alpha_constants, (0.0, 0.0));
    }

    #[test]
    fn nu_consistency() {
        // Π_i (nu / p_i) = nu^{n+1} / Π p_i = 1 exactly.
        for &(l1, l2) in &CASES {
            let case = case_spec(l1, l2).unwrap();
            let d = data(&case, [(5, 7), (-2, 5), (1, 3)]);
            let total = d.total_degree();
            let nu_exp = total.clone() / rat(case.n_plus_1 as i64, 1);
            let sum: Rat = d.exponents().iter().map(|k| nu_exp.clone() - k).sum();
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn homogeneity_formula() {
        // k = 0: a = 1, e = 0
        let zeros: Vec<Rat> = (0..4).map(|_| rat(0, 1)).collect();
        let (a, e) = homogeneity_exponents(4, &zeros).unwrap();
        assert_eq!(a, rat(1, 1));
        assert!(e.iter().all(Rat::is_zero));
        // CP3 expansion (0, -1, -1, -1): a = 4/(4 - 3) = 4
        let (a, _) =
            homogeneity_exponents(4, &[rat(0, 1), rat(-1, 1), rat(-1, 1), rat(-1, 1)]).unwrap();
        assert_eq!(a, rat(4, 1));
        let minus_ones: Vec<Rat> = (0..4).map(|_| rat(-1, 1)).collect();
        assert!(homogeneity_exponents(4, &minus_ones).is_err());
    }

    #[test]
    fn homogeneity_scaling_identity() {
        // a - 1 + a k_i = e_{i-1} - e_i (indices mod n+1) for random k.
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let n1 = rng.random_range(3usize..7);
            let k: Vec<Rat> = (0..n1)
                .map(|_| rat(rng.random_range(-6..12), rng.random_range(1..7)))
                .collect();
            let total: Rat = k.iter().sum();
            if (total.clone() + rat(n1 as i64, 1)).is_zero() {
                continue;
            }
            let (a, e) = homogeneity_exponents(n1, &k).unwrap();
            for i in 0..n1 {
                let prev = if i == 0 { e[n1 - 1].clone() } else { e[i - 1].clone() };
                let lhs = a.clone() - rat(1, 1) + a.clone() * k[i].clone();
                let rhs = prev - e[i].clone();
                assert_eq!(lhs, rhs, "index {i} of {k:?}");
            }
        }
    }
}
