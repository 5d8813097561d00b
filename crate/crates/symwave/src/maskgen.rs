//! Refinable mask builders: point symmetric (both senses), linear-phase,
//! axial symmetric (integer and semi-integer centers), group symmetric,
//! and the order-preserving perturbation families.
//!
//! Every builder verifies its own contract (normalization, symmetry, sum
//! rule order) exactly before returning.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::gauss::{GaussRat, Rat, Scaled};
use crate::lattice::{
    pair_digits, AxialDigitPartition, AxialOrbit, DilationContext, PointDigitPartition,
    SymmetryGroup,
};
use crate::laurent::{imag_part, pi_alpha, real_part, LaurentPoly};
use crate::mat::{HalfVec, IMat};
use crate::multiindex::{below, binom, delta_n, pow_rat, sub, weight, MIdx};
use crate::polyphase::{recompose, PointSense, PolyphaseVector};
use crate::theta::{
    minimal_even_theta, minimal_support_theta, product_theta, symmetrize_theta,
    univariate_theta, verify_theta_membership, Flavor,
};
use crate::verify::{
    check_duality, check_sum_rule_order, check_symmetry, lambda_table, SymmetrySpec,
};

/// The free parameters lambda'_beta of the point-symmetric construction.
#[derive(Clone, Debug)]
pub struct LambdaPrimeTable {
    pub entries: Vec<(MIdx, GaussRat)>,
}

impl LambdaPrimeTable {
    /// The delta table: lambda'_0 = 1, all others zero. This is the
    /// linear-phase-moment choice.
    pub fn delta(d: usize, n: usize) -> Self {
        let entries = delta_n(d, n as u32)
            .into_iter()
            .map(|a| {
                let v = if weight(&a) == 0 {
                    GaussRat::one()
                } else {
                    GaussRat::zero()
                };
                (a, v)
            })
            .collect();
        LambdaPrimeTable { entries }
    }

    pub fn get(&self, beta: &MIdx) -> GaussRat {
        self.entries
            .iter()
            .find(|(a, _)| a == beta)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(GaussRat::zero)
    }

    pub fn set(&mut self, beta: &MIdx, v: GaussRat) {
        for (a, e) in self.entries.iter_mut() {
            if a == beta {
                *e = v;
                return;
            }
        }
        self.entries.push((beta.clone(), v));
    }

    /// Parity constraints: sense (a) needs lambda'_beta = 0 at odd weights;
    /// sense (b) needs Re = 0 at odd weights and Im = 0 at even weights.
    /// Both need lambda'_0 = 1.
    pub fn validate(&self, sense: PointSense) -> Result<()> {
        for (a, v) in &self.entries {
            if weight(a) == 0 {
                if *v != GaussRat::one() {
                    return Err(Error::ParityViolation("lambda'_0 must be 1".into()));
                }
                continue;
            }
            let odd = weight(a) % 2 == 1;
            match sense {
                PointSense::A => {
                    if odd && !v.is_zero() {
                        return Err(Error::ParityViolation(format!(
                            "lambda'_{a:?} must vanish at odd weight"
                        )));
                    }
                }
                PointSense::B => {
                    if odd && !v.re.is_zero() {
                        return Err(Error::ParityViolation(format!(
                            "Re lambda'_{a:?} must vanish at odd weight"
                        )));
                    }
                    if !odd && !v.im.is_zero() {
                        return Err(Error::ParityViolation(format!(
                            "Im lambda'_{a:?} must vanish at even weight"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The induced moment table: lambda_alpha = sum_{gamma <= alpha}
/// lambda'_gamma C(alpha, gamma) (M^{-1} c)^{alpha - gamma}.
pub fn lambda_from_lambda_prime(
    lp: &LambdaPrimeTable,
    ctx: &DilationContext,
    c: &HalfVec,
    n: usize,
) -> Vec<(MIdx, GaussRat)> {
    let a = ctx.minv.mul_rvec(&c.as_rats());
    delta_n(ctx.dim(), n as u32)
        .into_iter()
        .map(|alpha| {
            let mut acc = GaussRat::zero();
            for gamma in below(&alpha) {
                let factor = binom(&alpha, &gamma) * pow_rat(&a, &sub(&alpha, &gamma));
                acc += &lp.get(&gamma).scale(&factor);
            }
            (alpha, acc)
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeneratorPolicy {
    /// Tensor products of univariate Vandermonde generators.
    ProductDefault,
    /// Shared-support solves with as few coefficients as conditions.
    Minimal,
}

/// A per-slot generator override: (digit index, beta) -> generator.
pub type GeneratorOverrides = BTreeMap<(usize, MIdx), LaurentPoly>;

/// Everything `build_point_mask` needs. The context must be the one
/// returned by `pair_digits` (paired digits reflect exactly through c).
#[derive(Clone, Debug)]
pub struct PointMaskRecipe<'a> {
    pub ctx: &'a DilationContext,
    pub partition: &'a PointDigitPartition,
    pub n: usize,
    pub sense: PointSense,
    pub lambda_prime: LambdaPrimeTable,
    pub policy: GeneratorPolicy,
    pub overrides: GeneratorOverrides,
}

fn pick_generator(
    recipe_overrides: &GeneratorOverrides,
    slot: usize,
    beta: &MIdx,
    n: usize,
    sigma: &[bool],
    flavor: Flavor,
    policy: GeneratorPolicy,
) -> Result<LaurentPoly> {
    if let Some(g) = recipe_overrides.get(&(slot, beta.clone())) {
        if g.sigma() != sigma {
            return Err(Error::GeneratorOffsetMismatch {
                expected: format!("{sigma:?}"),
                got: format!("{:?}", g.sigma()),
            });
        }
        verify_theta_membership(g, beta, n)?;
        // the construction relies on the slot symmetry of the generator
        let ok = match flavor {
            Flavor::Plain => true,
            Flavor::A => g.is_even(),
            Flavor::B => {
                let cr = g.conj_reflect();
                if weight(beta) % 2 == 0 {
                    cr == *g
                } else {
                    cr == g.neg()
                }
            }
            _ => false,
        };
        if !ok {
            return Err(Error::FlavorParityViolation(
                "override generator lacks the slot symmetry".into(),
            ));
        }
        return Ok(g.clone());
    }
    match (flavor, policy) {
        (Flavor::Plain, GeneratorPolicy::ProductDefault) => Ok(product_theta(beta, n, sigma)),
        (Flavor::Plain, GeneratorPolicy::Minimal) => {
            Ok(minimal_support_theta(std::slice::from_ref(beta), n, sigma, None)?
                .pop()
                .unwrap())
        }
        (Flavor::A, GeneratorPolicy::ProductDefault) => {
            symmetrize_theta(&product_theta(beta, n, sigma), Flavor::A, beta, n, None)
        }
        (Flavor::A, GeneratorPolicy::Minimal) => minimal_even_theta(beta, n, sigma),
        (Flavor::B, GeneratorPolicy::ProductDefault) => {
            symmetrize_theta(&product_theta(beta, n, sigma), Flavor::B, beta, n, None)
        }
        (Flavor::B, GeneratorPolicy::Minimal) => {
            let g = minimal_support_theta(std::slice::from_ref(beta), n, sigma, None)?
                .pop()
                .unwrap();
            symmetrize_theta(&g, Flavor::B, beta, n, None)
        }
        _ => unreachable!("point slots use Plain/A/B flavors"),
    }
}

/// Polyphase components of the point-symmetric mask, before recomposition.
fn point_mask_components(recipe: &PointMaskRecipe) -> Result<Vec<LaurentPoly>> {
    let ctx = recipe.ctx;
    let part = recipe.partition;
    let n = recipe.n;
    let d = ctx.dim();
    let c = &part.center;
    recipe.lambda_prime.validate(recipe.sense)?;
    let mut comps = vec![LaurentPoly::zero(d); ctx.m];
    let betas = delta_n(d, n as u32);
    // paired slots: the leader from weighted generators, the partner by
    // reflection (sense a) or conjugation (sense b)
    for &(i, ip) in &part.pairs {
        let a = ctx.minv_center_offset(c, i);
        let mut acc = LaurentPoly::zero(d);
        for beta in &betas {
            let mut w = GaussRat::zero();
            for gamma in below(beta) {
                let factor = binom(beta, &gamma) * pow_rat(&a, &sub(beta, &gamma));
                w += &recipe.lambda_prime.get(&gamma).scale(&factor);
            }
            if w.is_zero() {
                continue;
            }
            let g = pick_generator(
                &recipe.overrides,
                i,
                beta,
                n,
                &vec![false; d],
                Flavor::Plain,
                recipe.policy,
            )?;
            acc = acc.add(&g.scalar_mul(&w))?;
        }
        comps[i] = acc.mul_sqrt(ctx.m as u64, -1);
        comps[ip] = match recipe.sense {
            PointSense::A => comps[i].substitute(&IMat::identity(d).neg()),
            PointSense::B => comps[i].conj_reflect(),
        };
    }
    // self-paired slots: modulated symmetric combinations
    for &j in &part.j_set {
        let a = HalfVec::from_rats(&ctx.minv_center_offset(c, j))
            .expect("self-paired digits have half-integer offsets");
        let sigma = a.frac();
        let mut acc = LaurentPoly::zero(d);
        for beta in &betas {
            let w = recipe.lambda_prime.get(beta);
            if w.is_zero() {
                continue;
            }
            let flavor = match recipe.sense {
                PointSense::A => Flavor::A,
                PointSense::B => Flavor::B,
            };
            let g = pick_generator(&recipe.overrides, j, beta, n, &sigma, flavor, recipe.policy)?;
            acc = acc.add(&g.scalar_mul(&w))?;
        }
        comps[j] = acc.modulate(&a).mul_sqrt(ctx.m as u64, -1);
    }
    Ok(comps)
}

/// Build a mask symmetric about the partition center in the requested sense
/// with sum rule of order >= n.
pub fn build_point_mask(recipe: &PointMaskRecipe) -> Result<LaurentPoly> {
    let comps = point_mask_components(recipe)?;
    let m0 = recompose(&PolyphaseVector { comps }, recipe.ctx)?;
    if !m0.sigma_is_zero() {
        return Err(Error::BuilderPostcondition(
            "mask has non-integer degrees".into(),
        ));
    }
    if m0.value_at_zero() != Scaled::one() {
        return Err(Error::NotNormalized);
    }
    let spec = SymmetrySpec::Point {
        sense: recipe.sense,
        center: recipe.partition.center.clone(),
    };
    if check_symmetry(&m0, &spec).is_none() {
        return Err(Error::BuilderPostcondition("mask symmetry failed".into()));
    }
    let order = check_sum_rule_order(&m0, recipe.ctx, recipe.n.max(1));
    if order < recipe.n {
        return Err(Error::BuilderPostcondition(format!(
            "sum rule order {order} < requested {}",
            recipe.n
        )));
    }
    Ok(m0)
}

/// The lambda' = delta specialization: the mask additionally has
/// linear-phase moments of order n with phase c.
pub fn build_linear_phase_mask(
    ctx: &DilationContext,
    partition: &PointDigitPartition,
    n: usize,
    policy: GeneratorPolicy,
    overrides: GeneratorOverrides,
) -> Result<LaurentPoly> {
    let recipe = PointMaskRecipe {
        ctx,
        partition,
        n,
        sense: PointSense::A,
        lambda_prime: LambdaPrimeTable::delta(ctx.dim(), n),
        policy,
        overrides,
    };
    let m0 = build_point_mask(&recipe)?;
    // the dilated moment table must be exactly (M^{-1} c)^beta
    let a = ctx.minv.mul_rvec(&partition.center.as_rats());
    for (beta, lam) in lambda_table(&m0, ctx, n) {
        let want = Scaled::rational(GaussRat::real(pow_rat(&a, &beta)));
        if lam != want {
            return Err(Error::BuilderPostcondition(format!(
                "dilated moment at {beta:?} is {lam}, expected {want}"
            )));
        }
    }
    Ok(m0)
}

/// One additive perturbation term for the general-form family.
#[derive(Clone, Debug)]
pub struct Perturbation {
    /// Digit slot the term attaches to (a self-paired index for A/B terms,
    /// a leading paired index for T terms).
    pub slot: usize,
    pub alpha: MIdx,
    pub kind: PerturbationKind,
    pub poly: LaurentPoly,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PerturbationKind {
    /// Multiplies the even part of Pi_alpha on a self-paired slot.
    A,
    /// Multiplies the odd part of Pi_alpha on a self-paired slot.
    B,
    /// Free factor on a paired slot; the partner term is induced.
    T,
}

/// The general form of all masks with the same symmetry and order: add
/// terms vanishing to order n per polyphase slot. Preserves symmetry and
/// sum rule order >= n, both re-verified.
pub fn perturb_general_form(
    m0: &LaurentPoly,
    ctx: &DilationContext,
    partition: &PointDigitPartition,
    n: usize,
    sense: PointSense,
    perturbations: &[Perturbation],
) -> Result<LaurentPoly> {
    let d = ctx.dim();
    let c = &partition.center;
    let m_star = ctx.mat.transpose();
    let neg = IMat::identity(d).neg();
    let mut acc = m0.clone();
    for p in perturbations {
        if weight(&p.alpha) as usize != n {
            return Err(Error::OrderViolation {
                expected: n,
                got: weight(&p.alpha) as usize,
            });
        }
        if p.poly.is_zero() {
            continue;
        }
        let pi = pi_alpha(&p.alpha);
        match p.kind {
            PerturbationKind::A | PerturbationKind::B => {
                if !partition.j_set.contains(&p.slot) {
                    return Err(Error::PerturbationParityViolation(
                        "A/B terms attach to self-paired slots".into(),
                    ));
                }
                let a = HalfVec::from_rats(&ctx.minv_center_offset(c, p.slot))
                    .expect("self-paired digits have half-integer offsets");
                if p.poly.sigma() != a.frac() {
                    return Err(Error::GeneratorOffsetMismatch {
                        expected: format!("{:?}", a.frac()),
                        got: format!("{:?}", p.poly.sigma()),
                    });
                }
                let ok = match (sense, p.kind) {
                    (PointSense::A, PerturbationKind::A) => p.poly.is_even(),
                    (PointSense::A, PerturbationKind::B) => p.poly.is_odd(),
                    (PointSense::B, _) => p.poly.conj_reflect() == p.poly,
                    _ => unreachable!(),
                };
                if !ok {
                    return Err(Error::PerturbationParityViolation(format!(
                        "slot {} term has the wrong parity",
                        p.slot
                    )));
                }
                let base = match p.kind {
                    PerturbationKind::A => p.poly.mul(&real_part(&pi))?,
                    PerturbationKind::B => {
                        let im = p.poly.mul(&imag_part(&pi))?;
                        match sense {
                            PointSense::A => im.scalar_mul(&GaussRat::i()),
                            PointSense::B => im,
                        }
                    }
                    _ => unreachable!(),
                };
                let term = base.substitute(&m_star).modulate(c);
                acc = acc.add(&term)?;
            }
            PerturbationKind::T => {
                if !partition.i1().contains(&p.slot) {
                    return Err(Error::PerturbationParityViolation(
                        "T terms attach to leading paired slots".into(),
                    ));
                }
                if !p.poly.sigma_is_zero() {
                    return Err(Error::GeneratorOffsetMismatch {
                        expected: "integer degrees".into(),
                        got: format!("{:?}", p.poly.sigma()),
                    });
                }
                let prod = p.poly.mul(&pi)?.substitute(&m_star);
                let s_i = HalfVec::from_int(&ctx.digits[p.slot]);
                let direct = prod.modulate(&s_i);
                let twoc_minus_si = HalfVec::from_twice(
                    c.twice
                        .iter()
                        .zip(&ctx.digits[p.slot])
                        .map(|(tc, si)| 2 * tc - 2 * si)
                        .collect(),
                );
                let mirrored = match sense {
                    PointSense::A => prod.substitute(&neg),
                    PointSense::B => prod.conj_reflect(),
                }
                .modulate(&twoc_minus_si);
                acc = acc.add(&direct)?.add(&mirrored)?;
            }
        }
    }
    let spec = SymmetrySpec::Point {
        sense,
        center: c.clone(),
    };
    if check_symmetry(&acc, &spec).is_none() {
        return Err(Error::BuilderPostcondition(
            "perturbation broke the symmetry".into(),
        ));
    }
    if check_sum_rule_order(&acc, ctx, n.max(1)) < n {
        return Err(Error::BuilderPostcondition(
            "perturbation broke the sum rule".into(),
        ));
    }
    Ok(acc)
}

fn embed_univariate(g: &LaurentPoly, coord: usize, d: usize) -> LaurentPoly {
    let mut coeffs = BTreeMap::new();
    for (k, c) in g.iter() {
        let mut key = vec![0i64; d];
        key[coord] = k[0];
        coeffs.insert(key, c.clone());
    }
    let mut sigma = vec![false; d];
    sigma[coord] = g.sigma()[0];
    LaurentPoly::from_coeffs(d, sigma, g.root(), coeffs)
}

/// The reflection-even semi-integer factor used on half-odd coordinates:
/// e^{2 pi i a u} gA(u) with gA in the even zero-moment class.
fn modulated_even_factor(a_l: &Rat, n: usize, policy: GeneratorPolicy) -> Result<LaurentPoly> {
    let g = match policy {
        GeneratorPolicy::ProductDefault => {
            symmetrize_theta(&univariate_theta(0, n, true), Flavor::A, &vec![0], n, None)?
        }
        GeneratorPolicy::Minimal => minimal_even_theta(&vec![0], n, &[true])?,
    };
    let twice = a_l * Rat::from_integer(2.into());
    debug_assert!(twice.denom().is_one());
    let shift = HalfVec::from_twice(vec![i64::try_from(twice.numer()).unwrap()]);
    Ok(g.modulate(&shift))
}

/// The leading component of an axial orbit: a tensor of modulated even
/// factors on half-odd coordinates and moment-matching sums elsewhere,
/// hitting d_beta = (1/sqrt m) a^beta for a = M^{-1}(c - s).
fn axial_leader_component(
    a: &[Rat],
    n: usize,
    m: usize,
    policy: GeneratorPolicy,
) -> Result<LaurentPoly> {
    let d = a.len();
    let two = Rat::from_integer(2.into());
    let is_half_odd = |x: &Rat| {
        let t = x * &two;
        t.denom().is_one() && !num::Zero::is_zero(&(t.numer() % 2))
    };
    let mut acc = LaurentPoly::one(d);
    let mut rest: Vec<usize> = Vec::new();
    for (l, al) in a.iter().enumerate() {
        if is_half_odd(al) {
            let factor = modulated_even_factor(al, n, policy)?;
            acc = acc.mul(&embed_univariate(&factor, l, d))?;
        } else {
            rest.push(l);
        }
    }
    if !rest.is_empty() {
        match policy {
            GeneratorPolicy::ProductDefault => {
                for &l in &rest {
                    let mut sum = LaurentPoly::zero(1);
                    for b in 0..n {
                        let w = pow_rat(std::slice::from_ref(&a[l]), &[b as u32]);
                        if num::Zero::is_zero(&w) {
                            continue;
                        }
                        sum = sum
                            .add(&univariate_theta(b, n, false).scalar_mul(&GaussRat::real(w)))?;
                    }
                    acc = acc.mul(&embed_univariate(&sum, l, d))?;
                }
            }
            GeneratorPolicy::Minimal => {
                let dr = rest.len();
                let a_rest: Vec<Rat> = rest.iter().map(|&l| a[l].clone()).collect();
                let betas = delta_n(dr, n as u32);
                let gens = minimal_support_theta(&betas, n, &vec![false; dr], None)?;
                let mut sum = LaurentPoly::zero(dr);
                for (beta, g) in betas.iter().zip(&gens) {
                    let w = pow_rat(&a_rest, beta);
                    if num::Zero::is_zero(&w) {
                        continue;
                    }
                    sum = sum.add(&g.scalar_mul(&GaussRat::real(w)))?;
                }
                // lift the reduced-dimension sum into the full space
                let mut coeffs = BTreeMap::new();
                for (k, cval) in sum.iter() {
                    let mut key = vec![0i64; d];
                    for (pos, &l) in rest.iter().enumerate() {
                        key[l] = k[pos];
                    }
                    coeffs.insert(key, cval.clone());
                }
                let lift = LaurentPoly::from_coeffs(d, vec![false; d], None, coeffs);
                acc = acc.mul(&lift)?;
            }
        }
    }
    Ok(acc.mul_sqrt(m as u64, -1))
}

/// Affine image of a coefficient table under x -> E(x - c) + c, i.e.
/// t'(xi) = e^{2 pi i (c - E c, xi)} t(E* xi).
fn affine_image(t: &LaurentPoly, e: &IMat, c: &HalfVec) -> LaurentPoly {
    let e_c_twice = e.mul_vec(&c.twice);
    let shift = HalfVec::from_twice(
        c.twice
            .iter()
            .zip(&e_c_twice)
            .map(|(a, b)| a - b)
            .collect(),
    );
    t.substitute(&e.transpose()).modulate(&shift)
}

/// Build an axial symmetric mask with sum rule of order >= n over a
/// diagonal or antidiagonal dilation. The partition decides the center
/// ((0,0) or (1/2,1/2)).
pub fn build_axial_mask(
    ctx: &DilationContext,
    partition: &AxialDigitPartition,
    n: usize,
    policy: GeneratorPolicy,
) -> Result<LaurentPoly> {
    let d = ctx.dim();
    let c = partition.center(d);
    let m_star = ctx.mat.transpose();
    let group = crate::lattice::axial_group_elements();
    // build the leader piece of every orbit, then fill the orbit by the
    // affine group action, checking that overlapping fills agree
    let mut pieces: Vec<Option<LaurentPoly>> = vec![None; ctx.m];
    for orbit in &partition.orbits {
        let lead = match orbit {
            AxialOrbit::Single { idx } => *idx,
            AxialOrbit::Pair { lead, .. } => *lead,
            AxialOrbit::Quad { k, .. } => *k,
        };
        let a = ctx.minv_center_offset(&c, lead);
        let comp = axial_leader_component(&a, n, ctx.m, policy)?;
        let piece = comp
            .substitute(&m_star)
            .modulate(&HalfVec::from_int(&ctx.digits[lead]));
        for e in &group {
            let image = affine_image(&piece, e, &c);
            let any_key = image
                .iter()
                .next()
                .map(|(k, _)| k.clone())
                .unwrap_or_else(|| ctx.digits[lead].clone());
            let target = ctx.coset_index(&any_key);
            match &pieces[target] {
                None => pieces[target] = Some(image),
                Some(existing) => {
                    if *existing != image {
                        return Err(Error::BuilderPostcondition(format!(
                            "inconsistent orbit fill at digit {target}"
                        )));
                    }
                }
            }
        }
    }
    let mut acc = LaurentPoly::zero(d);
    for p in pieces.into_iter().flatten() {
        acc = acc.add(&p)?;
    }
    let m0 = acc.mul_sqrt(ctx.m as u64, -1);
    if !m0.sigma_is_zero() {
        return Err(Error::BuilderPostcondition(
            "axial mask has non-integer degrees".into(),
        ));
    }
    if m0.value_at_zero() != Scaled::one() {
        return Err(Error::NotNormalized);
    }
    let spec = SymmetrySpec::Axial { center: c };
    match check_symmetry(&m0, &spec) {
        Some(crate::verify::SymmetryDescriptor::Axial {
            sign_reflect: 1,
            sign_axis: 1,
            ..
        }) => {}
        _ => return Err(Error::BuilderPostcondition("axial symmetry failed".into())),
    }
    if check_sum_rule_order(&m0, ctx, n.max(1)) < n {
        return Err(Error::BuilderPostcondition("axial sum rule failed".into()));
    }
    Ok(m0)
}

/// Build a group-symmetric mask about the origin (digit-stable groups) and
/// its trivial dual. The mask moments collapse to a delta, so the constant
/// dual satisfies the biorthogonality condition to order n.
pub fn build_group_mask(
    ctx: &DilationContext,
    group: &SymmetryGroup,
    n: usize,
    policy: GeneratorPolicy,
) -> Result<(LaurentPoly, LaurentPoly)> {
    let d = ctx.dim();
    // offset classes sigma_j = frac(M^{-1} s_j) must be half-integer and
    // stable under every group element
    let mut sigmas = Vec::with_capacity(ctx.m);
    for s in &ctx.digits {
        let w = ctx.minv.mul_ivec(s);
        let h = HalfVec::from_rats(&w).map_err(|_| Error::OffsetNotRepresentable)?;
        sigmas.push(h);
    }
    for (ei, e) in group.elements.iter().enumerate() {
        for sig in &sigmas {
            let image = e.mul_vec(&sig.twice);
            let same = image
                .iter()
                .zip(&sig.twice)
                .all(|(a, b)| (a - b).rem_euclid(2) == 0);
            if !same {
                return Err(Error::OffsetNotPreserved(ei));
            }
        }
    }
    let mut comps = Vec::with_capacity(ctx.m);
    for sig in &sigmas {
        let sigma = sig.frac();
        let g0 = match policy {
            GeneratorPolicy::ProductDefault => product_theta(&vec![0; d], n, &sigma),
            GeneratorPolicy::Minimal => minimal_support_theta(&[vec![0; d]], n, &sigma, None)?
                .pop()
                .unwrap(),
        };
        let gh = symmetrize_theta(&g0, Flavor::Group, &vec![0; d], n, Some(group))?;
        comps.push(gh.modulate(&sig.neg()).mul_sqrt(ctx.m as u64, -1));
    }
    let m0 = recompose(&PolyphaseVector { comps }, ctx)?;
    if m0.value_at_zero() != Scaled::one() {
        return Err(Error::NotNormalized);
    }
    let spec = SymmetrySpec::Group {
        elements: group.elements.clone(),
        center: HalfVec::zero(d),
    };
    if check_symmetry(&m0, &spec).is_none() {
        return Err(Error::BuilderPostcondition("group symmetry failed".into()));
    }
    if check_sum_rule_order(&m0, ctx, n.max(1)) < n {
        return Err(Error::BuilderPostcondition("group sum rule failed".into()));
    }
    let dual = LaurentPoly::one(d);
    if !check_duality(&m0, &dual, n) {
        return Err(Error::TrivialDualInvalid);
    }
    Ok((m0, dual))
}

/// Convenience: pair the digits about c and build a point mask in one call.
pub fn point_mask_with_center(
    ctx: &DilationContext,
    c: &HalfVec,
    n: usize,
    sense: PointSense,
    lambda_prime: Option<LambdaPrimeTable>,
    policy: GeneratorPolicy,
) -> Result<(DilationContext, PointDigitPartition, LaurentPoly)> {
    let (ctx2, partition) = pair_digits(ctx, c)?;
    let recipe = PointMaskRecipe {
        ctx: &ctx2,
        partition: &partition,
        n,
        sense,
        lambda_prime: lambda_prime.unwrap_or_else(|| LambdaPrimeTable::delta(ctx.dim(), n)),
        policy,
        overrides: GeneratorOverrides::new(),
    };
    let m0 = build_point_mask(&recipe)?;
    Ok((ctx2, partition, m0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rat;
    use crate::lattice::{axial_partition, fourfold_group_elements, validate_group, CenterKind};
    use crate::verify::{check_linear_phase_moments, check_vanishing_moments};

    #[test]
    fn hat_from_minimal_point_recipe() {
        // d=1, M=2, c=0, n=2, minimal generators: the hat filter
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let (_, _, m0) = point_mask_with_center(
            &ctx,
            &HalfVec::zero(1),
            2,
            PointSense::A,
            None,
            GeneratorPolicy::Minimal,
        )
        .unwrap();
        assert_eq!(m0.coeff(&[0]), GaussRat::real(rat(1, 2)));
        assert_eq!(m0.coeff(&[1]), GaussRat::real(rat(1, 4)));
        assert_eq!(m0.coeff(&[-1]), GaussRat::real(rat(1, 4)));
        assert_eq!(m0.num_terms(), 3);
    }

    #[test]
    fn default_point_recipe_m3_matrix() {
        let ctx = DilationContext::with_digits(
            IMat::new(2, vec![1, -2, 2, -1]),
            vec![vec![0, 0], vec![0, -1], vec![0, 1]],
        )
        .unwrap();
        let (ctx2, _, m0) = point_mask_with_center(
            &ctx,
            &HalfVec::zero(2),
            4,
            PointSense::A,
            None,
            GeneratorPolicy::ProductDefault,
        )
        .unwrap();
        assert!(check_sum_rule_order(&m0, &ctx2, 4) >= 4);
        let (ok, phase) = check_linear_phase_moments(&m0, 4);
        assert!(ok);
        assert_eq!(phase, vec![rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn sense_b_complex_lambda() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let mut lp = LambdaPrimeTable::delta(1, 2);
        lp.set(&vec![1], GaussRat::imaginary(rat(1, 2)));
        let (ctx2, _, m0) = point_mask_with_center(
            &ctx,
            &HalfVec::zero(1),
            2,
            PointSense::B,
            Some(lp),
            GeneratorPolicy::Minimal,
        )
        .unwrap();
        // h_k = conj(h_{-k}) at the coefficient level
        for (k, h) in m0.iter() {
            assert_eq!(*h, m0.coeff(&[-k[0]]).conj());
        }
        assert!(check_sum_rule_order(&m0, &ctx2, 4) >= 2);
        // parity violation is rejected
        let mut bad = LambdaPrimeTable::delta(1, 2);
        bad.set(&vec![1], GaussRat::real(rat(1, 2)));
        assert!(matches!(
            point_mask_with_center(
                &ctx,
                &HalfVec::zero(1),
                2,
                PointSense::B,
                Some(bad),
                GeneratorPolicy::Minimal,
            ),
            Err(Error::ParityViolation(_))
        ));
    }

    #[test]
    fn shifted_center_linear_phase() {
        // d=1, M=2, c=1: phase must come out as 1
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::from_int(&[1])).unwrap();
        let m0 = build_linear_phase_mask(
            &ctx2,
            &part,
            2,
            GeneratorPolicy::Minimal,
            GeneratorOverrides::new(),
        )
        .unwrap();
        let (ok, phase) = check_linear_phase_moments(&m0, 2);
        assert!(ok);
        assert_eq!(phase, vec![rat(1, 1)]);
    }

    #[test]
    fn perturbation_keeps_order_and_symmetry() {
        // cube mask about c = 3/2, digits adjusted to pair through it
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::from_twice(vec![3])).unwrap();
        let recipe = PointMaskRecipe {
            ctx: &ctx2,
            partition: &part,
            n: 2,
            sense: PointSense::A,
            lambda_prime: LambdaPrimeTable::delta(1, 2),
            policy: GeneratorPolicy::Minimal,
            overrides: GeneratorOverrides::new(),
        };
        let m0 = build_point_mask(&recipe).unwrap();
        let i1 = part.i1()[0];
        let pert = Perturbation {
            slot: i1,
            alpha: vec![2],
            kind: PerturbationKind::T,
            poly: LaurentPoly::one(1).scalar_mul(&GaussRat::real(rat(1, 16))),
        };
        let m1 = perturb_general_form(&m0, &ctx2, &part, 2, PointSense::A, &[pert]).unwrap();
        assert_ne!(m0, m1);
        assert_eq!(check_sum_rule_order(&m1, &ctx2, 8), 2);
        // zero perturbation list: unchanged
        let same = perturb_general_form(&m0, &ctx2, &part, 2, PointSense::A, &[]).unwrap();
        assert_eq!(same, m0);
        // wrong order rejected
        let bad = Perturbation {
            slot: i1,
            alpha: vec![1],
            kind: PerturbationKind::T,
            poly: LaurentPoly::one(1),
        };
        assert!(matches!(
            perturb_general_form(&m0, &ctx2, &part, 2, PointSense::A, &[bad]),
            Err(Error::OrderViolation { .. })
        ));
    }

    #[test]
    fn axial_masks_all_cases() {
        for (mat, kind, n) in [
            (IMat::diag(&[2, 2]), CenterKind::Integer, 2),
            (IMat::diag(&[2, 2]), CenterKind::SemiInteger, 2),
            (IMat::diag(&[3, 3]), CenterKind::Integer, 2),
            (IMat::diag(&[3, 2]), CenterKind::Integer, 2),
            (IMat::diag(&[2, 3]), CenterKind::Integer, 2),
            (IMat::diag(&[3, 2]), CenterKind::SemiInteger, 2),
            (IMat::diag(&[-2, 2]), CenterKind::Integer, 1),
            (IMat::new(2, vec![0, 2, 2, 0]), CenterKind::Integer, 2),
        ] {
            let ctx = DilationContext::new(mat.clone()).unwrap();
            let (ctx2, part) = axial_partition(&ctx, kind).unwrap();
            let m0 = build_axial_mask(&ctx2, &part, n, GeneratorPolicy::Minimal)
                .unwrap_or_else(|e| panic!("axial build failed for {mat:?}: {e}"));
            assert!(check_sum_rule_order(&m0, &ctx2, n + 1) >= n);
        }
    }

    #[test]
    fn group_mask_quincunx() {
        let ctx = DilationContext::new(IMat::new(2, vec![1, 1, 1, -1])).unwrap();
        let g = validate_group(&ctx, &fourfold_group_elements()).unwrap();
        let (m0, dual) = build_group_mask(&ctx, &g, 2, GeneratorPolicy::Minimal).unwrap();
        assert_eq!(dual, LaurentPoly::one(2));
        assert!(check_sum_rule_order(&m0, &ctx, 4) >= 2);
        // moments collapse: 1 - m0 vanishes to order 2 at the origin
        let diff = LaurentPoly::one(2).sub(&m0).unwrap();
        assert!(check_vanishing_moments(&diff, 2) >= 2);
    }
}
