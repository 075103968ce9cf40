//! Creation-operator polynomials for the down-conversion source.
//!
//! A polynomial in photon creation operators acting on the vacuum is a
//! (generally unnormalized) Fock state. Coefficients are kept exact so that
//! the post-selected four-photon state falls out of the expansion with its
//! rational amplitude ratios intact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{ExactComplex, Surd};
use crate::mode::{Mode, ModeLabel, Polarization};
use crate::state::{ExactState, PureState};

/// A product of creation operators, stored as occupation counts in
/// canonical (mode, polarization) order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<ModeLabel, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn single(label: ModeLabel) -> Self {
        Monomial(BTreeMap::from([(label, 1)]))
    }

    pub fn from_labels(labels: impl IntoIterator<Item = ModeLabel>) -> Self {
        let mut m = Monomial::one();
        for l in labels {
            *m.0.entry(l).or_insert(0) += 1;
        }
        m
    }

    pub fn occupations(&self) -> impl Iterator<Item = (ModeLabel, u32)> + '_ {
        self.0.iter().map(|(l, n)| (*l, *n))
    }

    pub fn occupation(&self, label: ModeLabel) -> u32 {
        self.0.get(&label).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.0.keys().map(|l| l.mode)
    }

    /// Photons in a spatial mode, summed over polarizations.
    pub fn mode_occupation(&self, mode: Mode) -> u32 {
        self.0
            .iter()
            .filter(|(l, _)| l.mode == mode)
            .map(|(_, n)| n)
            .sum()
    }

    /// ‖m|0⟩‖² = Π nₖ!
    pub fn norm_sqr(&self) -> BigInt {
        self.0
            .values()
            .flat_map(|&n| 1..=n)
            .fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (l, n) in &other.0 {
            *out.0.entry(*l).or_insert(0) += n;
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (l, n) in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if *n == 1 {
                write!(f, "{l}+")?;
            } else {
                write!(f, "{l}+^{n}")?;
            }
        }
        Ok(())
    }
}

/// Sum of monomials with exact complex coefficients. Zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorPolynomial {
    terms: BTreeMap<Monomial, ExactComplex>,
}

impl OperatorPolynomial {
    pub fn zero() -> Self {
        OperatorPolynomial::default()
    }

    pub fn one() -> Self {
        OperatorPolynomial::from_term(Monomial::one(), ExactComplex::one())
    }

    pub fn creation(mode: Mode, pol: Polarization) -> Self {
        OperatorPolynomial::from_term(
            Monomial::single(ModeLabel::new(mode, pol)),
            ExactComplex::one(),
        )
    }

    pub fn from_term(monomial: Monomial, coeff: ExactComplex) -> Self {
        let mut p = OperatorPolynomial::zero();
        p.add_term(monomial, coeff);
        p
    }

    pub fn add_term(&mut self, monomial: Monomial, coeff: ExactComplex) {
        if coeff.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(monomial)
            .or_insert_with(ExactComplex::zero);
        *slot = &*slot + &coeff;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactComplex)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> ExactComplex {
        self.terms
            .get(monomial)
            .cloned()
            .unwrap_or_else(ExactComplex::zero)
    }

    /// The common degree of all terms, or `None` if empty or inhomogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, s: &ExactComplex) -> Self {
        let mut out = OperatorPolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &OperatorPolynomial) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Product of commuting creation-operator polynomials.
    pub fn mul(&self, other: &OperatorPolynomial) -> Self {
        let mut out = OperatorPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(OperatorPolynomial::one(), |acc, _| acc.mul(self))
    }

    /// ‖P|0⟩‖² = Σ |c_m|² Π nₖ!; monomials are orthogonal Fock states.
    pub fn state_norm_sqr(&self) -> Surd {
        self.terms.iter().fold(Surd::zero(), |acc, (m, c)| {
            let weight = Surd::from_rational(num_rational::BigRational::from_integer(m.norm_sqr()));
            &acc + &(&c.norm_sqr() * &weight)
        })
    }

    /// Replaces every creation operator by a polynomial, fully expanding.
    pub fn substitute<F>(&self, mut image: F) -> Result<Self>
    where
        F: FnMut(ModeLabel) -> Result<OperatorPolynomial>,
    {
        let mut out = OperatorPolynomial::zero();
        for (m, c) in &self.terms {
            let mut product = OperatorPolynomial::from_term(Monomial::one(), c.clone());
            for (label, n) in m.occupations() {
                product = product.mul(&image(label)?.pow(n));
            }
            out = out.add(&product);
        }
        Ok(out)
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c}) {m}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// (a_H†b_H† + a_V†b_V†)^order
pub fn spdc_emission(order: u32) -> OperatorPolynomial {
    let pair = |p: Polarization| {
        OperatorPolynomial::creation(Mode::A, p).mul(&OperatorPolynomial::creation(Mode::B, p))
    };
    pair(Polarization::H).add(&pair(Polarization::V)).pow(order)
}

/// The four-photon term of the source: (a_H†b_H† + a_V†b_V†)².
pub fn spdc_second_order() -> OperatorPolynomial {
    spdc_emission(2)
}

/// Beam splitters taking a → (c + e)/√2 and b → (d + f)/√2, polarization preserved.
pub fn apply_beam_splitters(poly: &OperatorPolynomial) -> Result<OperatorPolynomial> {
    let h = ExactComplex::real(Surd::inv_sqrt2());
    poly.substitute(|label| {
        let (t, r) = match label.mode {
            Mode::A => (Mode::C, Mode::E),
            Mode::B => (Mode::D, Mode::F),
            other => {
                return Err(Error::UnknownMode {
                    mode: other,
                    context: "beam-splitter input must be mode a or b",
                })
            }
        };
        Ok(OperatorPolynomial::creation(t, label.pol)
            .add(&OperatorPolynomial::creation(r, label.pol))
            .scale(&h))
    })
}

/// Outcome of conditioning on one photon per detector.
#[derive(Clone, Debug)]
pub struct PostSelected {
    /// Kept amplitudes, unnormalized, indexed like `PureState`.
    pub exact: ExactState,
    pub state: PureState,
    /// Fraction of the squared norm surviving post-selection.
    pub weight: Surd,
}

/// Keeps the terms with exactly one photon in each mode of `order` and maps
/// them to polarization qubits (H = 0, V = 1).
pub fn postselect_one_per_mode(poly: &OperatorPolynomial, order: &[Mode]) -> Result<PostSelected> {
    let n = order.len();
    if poly.is_empty() {
        return Err(Error::PostSelectionAnnihilates);
    }
    match poly.homogeneous_degree() {
        Some(d) if d as usize == n => {}
        _ => return Err(Error::NotHomogeneous { expected: n }),
    }
    let total = poly.state_norm_sqr();
    let mut amps = vec![ExactComplex::zero(); 1 << n];
    let mut kept_any = false;
    'terms: for (m, c) in poly.terms() {
        if m.modes().any(|md| !order.contains(&md)) {
            continue;
        }
        let mut index = 0usize;
        for (k, &mode) in order.iter().enumerate() {
            if m.mode_occupation(mode) != 1 {
                continue 'terms;
            }
            if m.occupation(ModeLabel::new(mode, Polarization::V)) == 1 {
                index |= 1 << (n - 1 - k);
            }
        }
        amps[index] = &amps[index] + c;
        kept_any = true;
    }
    if !kept_any || amps.iter().all(ExactComplex::is_zero) {
        return Err(Error::PostSelectionAnnihilates);
    }
    let exact = ExactState::new(order.to_vec(), amps)?;
    // single-occupancy monomials have unit Fock norm
    let weight = exact
        .norm_sqr()
        .div(&total)
        .expect("nonzero polynomial has nonzero norm");
    let state = exact.to_pure();
    Ok(PostSelected {
        exact,
        state,
        weight,
    })
}

/// The full derivation: second-order emission, beam splitters, fourfold coincidence
/// over (c, d, e, f).
pub fn four_photon_state() -> PostSelected {
    let expanded = apply_beam_splitters(&spdc_second_order()).expect("source modes are a and b");
    postselect_one_per_mode(&expanded, &Mode::DETECTORS).expect("fourfold terms exist")
}

/// Overlaps of a four-mode state with the GHZ and EPR⊗EPR reference states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzEprDecomposition {
    pub ghz: num_complex::Complex64,
    pub epr: num_complex::Complex64,
    /// Norm of the part orthogonal to both references.
    pub residual: f64,
}

/// |EPR⟩ = (|HV⟩ + |VH⟩)/√2 on the pairs (c, e) and (d, f); |GHZ⟩ = (|HHHH⟩ + |VVVV⟩)/√2.
pub fn ghz_reference() -> PureState {
    PureState::ghz(vec![Mode::C, Mode::E, Mode::D, Mode::F]).expect("four modes")
}

/// |Ψ⁺⟩_ce ⊗ |Ψ⁺⟩_df, written over (c, e, d, f).
pub fn epr_pair_reference() -> PureState {
    use num_complex::Complex64;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi_plus = |x, y| {
        PureState::new(
            vec![x, y],
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .expect("normalized")
    };
    psi_plus(Mode::C, Mode::E)
        .tensor(&psi_plus(Mode::D, Mode::F))
        .expect("disjoint modes")
}

pub fn ghz_epr_decompose(state: &PureState) -> Result<GhzEprDecomposition> {
    if state.num_qubits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.num_qubits(),
        });
    }
    let reordered = state.permuted(&[Mode::C, Mode::E, Mode::D, Mode::F])?;
    let ghz = ghz_reference().inner(&reordered)?;
    let epr = epr_pair_reference().inner(&reordered)?;
    // component orthogonal to both references
    let (g, e) = (ghz_reference(), epr_pair_reference());
    let residual = reordered
        .amplitudes()
        .iter()
        .zip(g.amplitudes().iter().zip(e.amplitudes()))
        .map(|(psi, (gi, ei))| (psi - ghz * gi - epr * ei).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(GhzEprDecomposition { ghz, epr, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn label(mode: Mode, pol: Polarization) -> ModeLabel {
        ModeLabel::new(mode, pol)
    }

    use Mode::*;
    use Polarization::{H, V};

    #[test]
    fn second_order_expansion() {
        let p = spdc_second_order();
        assert_eq!(p.len(), 3);
        let m = |labels: &[ModeLabel]| Monomial::from_labels(labels.iter().copied());
        assert_eq!(
            p.coefficient(&m(&[label(A, H), label(A, H), label(B, H), label(B, H)])),
            ExactComplex::from_int(1)
        );
        assert_eq!(
            p.coefficient(&m(&[label(A, V), label(A, V), label(B, V), label(B, V)])),
            ExactComplex::from_int(1)
        );
        assert_eq!(
            p.coefficient(&m(&[label(A, H), label(B, H), label(A, V), label(B, V)])),
            ExactComplex::from_int(2)
        );
        let sum: i64 = p
            .terms()
            .map(|(_, c)| c.norm_sqr().to_rational().unwrap())
            .map(|r| i64::try_from(r.to_integer()).unwrap())
            .sum::<i64>();
        assert_eq!(sum, 6);
    }

    #[test]
    fn first_order_expansion() {
        let p = spdc_emission(1);
        assert_eq!(p.len(), 2);
        for (m, c) in p.terms() {
            assert_eq!(m.degree(), 2);
            assert_eq!(*c, ExactComplex::one());
        }
    }

    #[test]
    fn single_pair_through_beam_splitters() {
        let p = OperatorPolynomial::from_term(
            Monomial::from_labels([label(A, H), label(B, H)]),
            ExactComplex::one(),
        );
        let out = apply_beam_splitters(&p).unwrap();
        assert_eq!(out.len(), 4);
        let half = ExactComplex::real(Surd::from_ratio(1, 2));
        for (x, y) in [(C, D), (C, F), (E, D), (E, F)] {
            let m = Monomial::from_labels([label(x, H), label(y, H)]);
            assert_eq!(out.coefficient(&m), half);
        }
    }

    #[test]
    fn empty_polynomial_passes_through() {
        assert!(apply_beam_splitters(&OperatorPolynomial::zero())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn detector_modes_rejected_as_input() {
        let p = OperatorPolynomial::creation(C, H);
        let err = apply_beam_splitters(&p).unwrap_err();
        assert!(matches!(err, Error::UnknownMode { mode: C, .. }));
    }

    #[test]
    fn beam_splitters_conserve_fock_norm() {
        let inputs = [
            spdc_emission(1),
            spdc_second_order(),
            OperatorPolynomial::creation(A, H).mul(&OperatorPolynomial::creation(A, V)),
            OperatorPolynomial::creation(A, H)
                .pow(2)
                .add(&OperatorPolynomial::creation(B, V).scale(&ExactComplex::i()).pow(2)),
        ];
        for p in inputs {
            let out = apply_beam_splitters(&p).unwrap();
            assert_eq!(p.state_norm_sqr(), out.state_norm_sqr(), "{p}");
        }
    }

    #[test]
    fn postselection_errors() {
        let not_homogeneous = spdc_emission(1).add(&spdc_second_order());
        assert!(matches!(
            postselect_one_per_mode(&not_homogeneous, &Mode::DETECTORS),
            Err(Error::NotHomogeneous { .. })
        ));
        // all photons bunched in c and d
        let bunched = OperatorPolynomial::creation(C, H)
            .pow(2)
            .mul(&OperatorPolynomial::creation(D, V).pow(2));
        assert!(matches!(
            postselect_one_per_mode(&bunched, &Mode::DETECTORS),
            Err(Error::PostSelectionAnnihilates)
        ));
        assert!(matches!(
            postselect_one_per_mode(&OperatorPolynomial::zero(), &Mode::DETECTORS),
            Err(Error::PostSelectionAnnihilates)
        ));
    }

    #[test]
    fn derived_state_has_eq2_ratios_exactly() {
        let ps = four_photon_state();
        let amps = ps.exact.amplitudes();
        let one = ExactComplex::one();
        let half = ExactComplex::real(Surd::from_ratio(1, 2));
        for (i, a) in amps.iter().enumerate() {
            let expected = match i {
                0b0000 | 0b1111 => one.clone(),
                0b0011 | 0b0110 | 0b1001 | 0b1100 => half.clone(),
                _ => ExactComplex::zero(),
            };
            assert_eq!(*a, expected, "index {i:04b}");
        }
        assert_eq!(ps.exact.norm_sqr(), Surd::from_int(3));
        // 3 of the 12 units of Fock norm survive
        assert_eq!(ps.weight.to_rational().unwrap(), ratio(1, 4));
        let s = 1.0 / 3f64.sqrt();
        assert!((ps.state.amplitudes()[0].re - s).abs() < 1e-12);
        assert!((ps.state.amplitudes()[3].re - s / 2.0).abs() < 1e-12);
        assert!((ps.state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_of_derived_state() {
        let d = ghz_epr_decompose(&four_photon_state().state).unwrap();
        assert!((d.ghz.re - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((d.epr.re - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(d.ghz.im.abs() < 1e-12 && d.epr.im.abs() < 1e-12);
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn decomposition_of_references() {
        let g = ghz_reference().permuted(&Mode::DETECTORS).unwrap();
        let d = ghz_epr_decompose(&g).unwrap();
        assert!((d.ghz.re - 1.0).abs() < 1e-12 && d.epr.norm() < 1e-12);
        let hhhv = PureState::basis(Mode::DETECTORS.to_vec(), 0b0001).unwrap();
        let d = ghz_epr_decompose(&hhhv).unwrap();
        assert!(d.ghz.norm() < 1e-12 && d.epr.norm() < 1e-12);
        assert!((d.residual - 1.0).abs() < 1e-12);
        assert!(ghz_reference().inner(&epr_pair_reference()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn decomposition_rejects_wrong_size() {
        let s = PureState::basis(vec![C, D], 0).unwrap();
        assert!(matches!(
            ghz_epr_decompose(&s),
            Err(Error::DimensionMismatch { .. })
        ));
        let s = PureState::basis(vec![A, B, C, D], 0).unwrap();
        assert!(matches!(ghz_epr_decompose(&s), Err(Error::ModeMismatch { .. })));
    }
}
