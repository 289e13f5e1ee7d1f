//! Hand-written constructions of the states the simulator should produce.
//!
//! Everything here is built term by term from products of single-qubit kets,
//! without using any gate or evolution code from the library.

#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use faraday_qkd::{Complex64, EquatorAngle, StateVector};

pub type Ket = Vec<Complex64>;

/// (coef, A, B, [E1, E2], [E1′, E2′], [C, D]).
pub type PhotonTerm = (Complex64, Ket, Ket, [Ket; 2], [Ket; 2], [Ket; 2]);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn up() -> Ket {
    vec![c(1.0, 0.0), c(0.0, 0.0)]
}

pub fn down() -> Ket {
    vec![c(0.0, 0.0), c(1.0, 0.0)]
}

/// (|↑⟩ + e^{iφ}|↓⟩)/√2 written out directly.
pub fn equator(phi: f64) -> Ket {
    vec![c(FRAC_1_SQRT_2, 0.0), Complex64::from_polar(FRAC_1_SQRT_2, phi)]
}

pub fn bar(phi: f64) -> Ket {
    equator(phi + std::f64::consts::PI)
}

/// Tensor product with the first factor on the lowest qubits.
pub fn kron(parts: &[Ket]) -> Ket {
    let mut out = vec![c(1.0, 0.0)];
    for p in parts {
        let mut next = vec![c(0.0, 0.0); out.len() * p.len()];
        for (j, &b) in p.iter().enumerate() {
            for (i, &a) in out.iter().enumerate() {
                next[i + out.len() * j] = a * b;
            }
        }
        out = next;
    }
    out
}

/// Σ coef · (⊗ parts), normalized.
pub fn superpose(terms: &[(Complex64, Vec<Ket>)]) -> StateVector {
    let mut total: Option<Ket> = None;
    for (coef, parts) in terms {
        let k = kron(parts);
        match &mut total {
            None => total = Some(k.into_iter().map(|x| x * coef).collect()),
            Some(t) => t.iter_mut().zip(k).for_each(|(t, x)| *t += x * coef),
        }
    }
    StateVector::from_amplitudes(total.expect("at least one term")).expect("non-zero superposition")
}

fn a(x: EquatorAngle) -> f64 {
    x.radians()
}

/// Register A, B, C, D after Alice's first rotation of C.
pub fn forward_leg_state(alpha: EquatorAngle, beta: EquatorAngle) -> StateVector {
    let (al, be) = (a(alpha), a(beta));
    let h = std::f64::consts::FRAC_PI_2;
    superpose(&[
        (Complex64::from_polar(1.0, -h / 2.0), vec![up(), equator(0.0), equator(al + h), equator(be)]),
        (Complex64::from_polar(1.0, h / 2.0), vec![down(), equator(0.0), equator(al - h), equator(be)]),
    ])
}

/// Register A, B, C, D with C on its way back to Alice.
pub fn return_leg_state(alpha: EquatorAngle, beta: EquatorAngle) -> StateVector {
    let (al, be) = (a(alpha), a(beta));
    superpose(&[
        (c(1.0, 0.0), vec![up(), down(), equator(al), equator(be)]),
        (c(1.0, 0.0), vec![down(), up(), equator(al), equator(be)]),
        (c(0.0, -1.0), vec![up(), up(), bar(al), equator(be)]),
        (c(0.0, 1.0), vec![down(), down(), bar(al), equator(be)]),
    ])
}

/// The GHZ-like register A, B, C, D before the travel-qubit measurements.
pub fn ghz_like_state(alpha: EquatorAngle, beta: EquatorAngle) -> StateVector {
    let (al, be) = (a(alpha), a(beta));
    superpose(&[
        (c(1.0, 0.0), vec![up(), down(), equator(al), equator(be)]),
        (c(1.0, 0.0), vec![down(), up(), equator(al), equator(be)]),
        (c(-1.0, 0.0), vec![up(), up(), bar(al), bar(be)]),
        (c(-1.0, 0.0), vec![down(), down(), bar(al), bar(be)]),
    ])
}

/// Ancilla pair |ε₀₀⟩ = |↑⟩, |ε₁₁⟩ = c|↑⟩ + √(1−c²)|↓⟩.
pub fn ancilla_pair(overlap: f64) -> (Ket, Ket) {
    (up(), vec![c(overlap, 0.0), c((1.0 - overlap * overlap).sqrt(), 0.0)])
}

/// The six unnormalized vectors on (E, F) for relative angle `t`, indexed 1..=6.
pub fn sextet(t: f64, cx: f64, cy: f64) -> [Ket; 7] {
    let (e0, e1) = ancilla_pair(cx);
    let (n0, n1) = ancilla_pair(cy);
    let (cc, ss) = ((t / 2.0).cos().powi(2), (t / 2.0).sin().powi(2));
    let comb = |x: f64, p: &[Ket], y: f64, q: &[Ket]| -> Ket {
        kron(p).iter().zip(kron(q)).map(|(u, v)| u * x + v * y).collect()
    };
    let (e0n0, e1n1) = (vec![e0.clone(), n0.clone()], vec![e1.clone(), n1.clone()]);
    let (e0n1, e1n0) = (vec![e0, n1], vec![e1, n0]);
    [
        Vec::new(),
        comb(1.0, &e0n0, -1.0, &e1n1),
        comb(ss, &e0n0, cc, &e1n1),
        comb(cc, &e0n0, ss, &e1n1),
        comb(1.0, &e0n1, -1.0, &e1n0),
        comb(cc, &e0n1, ss, &e1n0),
        comb(ss, &e0n1, cc, &e1n0),
    ]
}

pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Register A, B, C, D, E, F, E′, F′ after a symmetric general attack with
/// Eve's basis angle `gamma`, written as a sum over the sixteen home and
/// travel-qubit branches.
pub fn attacked_state(alpha: EquatorAngle, beta: EquatorAngle, gamma: EquatorAngle, cx: f64, cy: f64) -> StateVector {
    let h = std::f64::consts::FRAC_PI_2;
    let (al, be, g) = (a(alpha), a(beta), a(gamma));
    let (at, bt) = (al - g + h, be - g + h);
    let v = sextet(at, cx, cy);
    let w = sextet(bt, cx, cy);
    let (sa, sb) = (at.sin(), bt.sin());
    let q = sa * sb / 4.0;
    let i = |x: f64| c(0.0, x);
    let r = |x: f64| c(x, 0.0);
    #[rustfmt::skip]
    #[allow(clippy::type_complexity)]
    let blocks: [(Ket, Ket, [(Complex64, Ket, Ket, usize, usize); 4]); 4] = [
        (equator(al), equator(be), [
            (r(q), up(), up(), 1, 1), (r(1.0), up(), down(), 5, 2),
            (r(1.0), down(), up(), 2, 5), (r(q), down(), down(), 4, 4),
        ]),
        (equator(al), bar(be), [
            (i(-sa / 2.0), up(), up(), 1, 3), (i(-sb / 2.0), up(), down(), 5, 1),
            (i(sb / 2.0), down(), up(), 2, 4), (i(sa / 2.0), down(), down(), 4, 6),
        ]),
        (bar(al), equator(be), [
            (i(-sb / 2.0), up(), up(), 3, 1), (i(sa / 2.0), up(), down(), 4, 2),
            (i(-sa / 2.0), down(), up(), 1, 5), (i(sb / 2.0), down(), down(), 6, 4),
        ]),
        (bar(al), bar(be), [
            (r(-1.0), up(), up(), 3, 3), (r(q), up(), down(), 4, 1),
            (r(q), down(), up(), 1, 4), (r(-1.0), down(), down(), 6, 6),
        ]),
    ];
    let mut terms = Vec::new();
    for (cq, dq, block) in blocks {
        for (coef, ha, hb, ef, efp) in block {
            terms.push((coef, vec![ha, hb, cq.clone(), dq.clone(), v[ef].clone(), w[efp].clone()]));
        }
    }
    superpose(&terms)
}

/// One-home impersonation: homes A, B, E then travel qubits C, D, E′.
pub fn one_home_state(alpha: EquatorAngle, beta: EquatorAngle, epsilon: EquatorAngle) -> StateVector {
    let (al, be, ep) = (a(alpha), a(beta), a(epsilon));
    let one = c(1.0, 0.0);
    superpose(&[
        (one, vec![up(), up(), up(), bar(al), bar(be), bar(ep)]),
        (one, vec![down(), down(), down(), bar(al), bar(be), bar(ep)]),
        (one, vec![up(), down(), up(), bar(al), equator(be), bar(ep)]),
        (one, vec![down(), up(), down(), bar(al), equator(be), bar(ep)]),
        (one, vec![up(), up(), down(), equator(al), equator(be), equator(ep)]),
        (one, vec![down(), down(), up(), equator(al), equator(be), equator(ep)]),
        (one, vec![up(), down(), down(), equator(al), bar(be), equator(ep)]),
        (one, vec![down(), up(), up(), equator(al), bar(be), equator(ep)]),
    ])
}

/// Three-photon splitting on the register A, B, C, D, E1, E2, E1′, E2′.
pub fn three_photon_terms(alpha: EquatorAngle, beta: EquatorAngle) -> Vec<PhotonTerm> {
    let (al, be) = (a(alpha), a(beta));
    let bb = || [bar(al), bar(be)];
    let nn = || [equator(al), equator(be)];
    vec![
        (c(0.0, 1.0), up(), up(), bb(), bb(), bb()),
        (c(0.0, -1.0), down(), down(), nn(), bb(), bb()),
        (c(1.0, 0.0), up(), down(), [bar(al), equator(be)], nn(), nn()),
        (c(1.0, 0.0), down(), up(), [equator(al), bar(be)], nn(), nn()),
    ]
}

fn three_photon_superpose(terms: &[PhotonTerm]) -> StateVector {
    let t: Vec<(Complex64, Vec<Ket>)> = terms
        .iter()
        .map(|(k, ha, hb, e, ep, cd)| {
            (*k, vec![ha.clone(), hb.clone(), cd[0].clone(), cd[1].clone(), e[0].clone(), e[1].clone(), ep[0].clone(), ep[1].clone()])
        })
        .collect();
    superpose(&t)
}

pub fn three_photon_state(alpha: EquatorAngle, beta: EquatorAngle) -> StateVector {
    three_photon_superpose(&three_photon_terms(alpha, beta))
}

/// The two collapsed branches after Alice and Bob measure C and D: C, D both
/// barred (key 0) or both unbarred (key 1). The C, D factor is kept so that
/// the result lives on the full register.
pub fn three_photon_branch(alpha: EquatorAngle, beta: EquatorAngle, barred: bool) -> StateVector {
    let terms = three_photon_terms(alpha, beta);
    let pick = if barred { &terms[..2] } else { &terms[2..] };
    // the ±i on the barred branch is a global phase
    let fixed: Vec<_> = pick
        .iter()
        .map(|(k, ha, hb, e, ep, cd)| {
            let k = if barred { *k * c(0.0, -1.0) } else { *k };
            (k, ha.clone(), hb.clone(), e.clone(), ep.clone(), cd.clone())
        })
        .collect();
    three_photon_superpose(&fixed)
}

#[derive(Clone, Copy)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// A Bell state on two qubits whose "0" and "1" are `zero` and `one`.
pub fn bell(b: Bell, zero: (&Ket, &Ket), one: (&Ket, &Ket)) -> Ket {
    let s = FRAC_1_SQRT_2;
    let (first, second, sign) = match b {
        Bell::PhiPlus => ((zero.0, zero.1), (one.0, one.1), 1.0),
        Bell::PhiMinus => ((zero.0, zero.1), (one.0, one.1), -1.0),
        Bell::PsiPlus => ((zero.0, one.1), (one.0, zero.1), 1.0),
        Bell::PsiMinus => ((zero.0, one.1), (one.0, zero.1), -1.0),
    };
    let x = kron(&[first.0.clone(), first.1.clone()]);
    let y = kron(&[second.0.clone(), second.1.clone()]);
    x.iter().zip(y).map(|(p, q)| (p + q * sign) * s).collect()
}

/// Four-home variant on A1, A2, B1, B2, C, D, E1, E2, E1′, E2′. Homes pair
/// up as (A1, A2) and (B1, B2) in σ^z; Eve's photons pair up as (E1, E2) on
/// the α pulse and (E1′, E2′) on the β pulse, with the unbarred angle as "0".
pub fn four_home_state(alpha: EquatorAngle, beta: EquatorAngle) -> StateVector {
    use Bell::*;
    let (al, be) = (a(alpha), a(beta));
    let (u, d) = (up(), down());
    let (na, ba, nb, bbe) = (equator(al), bar(al), equator(be), bar(be));
    let home = |x: Bell| bell(x, (&u, &u), (&d, &d));
    let ph_a = |x: Bell| bell(x, (&na, &na), (&ba, &ba));
    let ph_b = |x: Bell| bell(x, (&nb, &nb), (&bbe, &bbe));
    let quarter = |re: f64, im: f64| c(re / 4.0, im / 4.0);
    // (block coefficient, C and D barred, [(sign, A pair, B pair, E pair, E′ pair)])
    #[allow(clippy::type_complexity)]
    let blocks: [(Complex64, bool, [(f64, Bell, Bell, Bell, Bell); 4]); 4] = [
        (quarter(-1.0, 0.0), true, [
            (1.0, PhiPlus, PsiPlus, PhiPlus, PsiPlus),
            (1.0, PhiPlus, PsiMinus, PhiPlus, PsiMinus),
            (-1.0, PhiMinus, PsiPlus, PhiMinus, PsiPlus),
            (-1.0, PhiMinus, PsiMinus, PhiMinus, PsiMinus),
        ]),
        (quarter(-1.0, 0.0), true, [
            (1.0, PsiMinus, PhiMinus, PsiPlus, PhiPlus),
            (-1.0, PsiMinus, PhiPlus, PsiPlus, PhiMinus),
            (1.0, PsiPlus, PhiMinus, PsiMinus, PhiPlus),
            (-1.0, PsiPlus, PhiPlus, PsiMinus, PhiMinus),
        ]),
        (quarter(0.0, -1.0), false, [
            (1.0, PsiMinus, PsiPlus, PhiPlus, PhiPlus),
            (-1.0, PsiMinus, PsiMinus, PhiPlus, PhiMinus),
            (-1.0, PsiPlus, PsiPlus, PhiMinus, PhiPlus),
            (1.0, PsiPlus, PsiMinus, PhiMinus, PhiMinus),
        ]),
        (quarter(0.0, 1.0), false, [
            (1.0, PhiPlus, PhiMinus, PsiPlus, PsiPlus),
            (1.0, PhiPlus, PhiPlus, PsiPlus, PsiMinus),
            (1.0, PhiMinus, PhiMinus, PsiMinus, PsiPlus),
            (1.0, PhiMinus, PhiPlus, PsiMinus, PsiMinus),
        ]),
    ];
    let mut terms = Vec::new();
    for (coef, barred, rows) in blocks {
        let (cq, dq) = if barred { (ba.clone(), bbe.clone()) } else { (na.clone(), nb.clone()) };
        for (sign, ha, hb, e, ep) in rows {
            terms.push((coef * sign, vec![home(ha), home(hb), cq.clone(), dq.clone(), ph_a(e), ph_b(ep)]));
        }
    }
    superpose(&terms)
}

/// Detection probability of a general attack averaged over uniform α̃, β̃.
pub fn averaged_detection(cx: f64, cy: f64) -> f64 {
    let (x2, y2) = (cx * cx, cy * cy);
    3.0 / 8.0 - (x2 + y2 + x2 * y2) / 8.0
}

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Eve's error rate as a function of the detection probability.
pub fn eve_error(p_d: f64) -> f64 {
    let r = (1.0 - 2.0 * p_d).sqrt();
    0.5 - 0.5 * r * (1.0 - r) * (2.0 * r + (2.0 * (1.0 - r)).sqrt())
}
