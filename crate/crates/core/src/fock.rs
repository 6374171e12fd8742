//! Truncated graded realization of the three level-two modules and the
//! elementary mode actions: bosons a_m with [a_m, a_n] = δ_{m+n,0}[2m]²/m,
//! fermions φ_m with {φ_m, φ_n} = δ_{m+n,0}η_m (NS or R sector), lattice
//! charges e^{mα/2}, and the grading operator d.
//!
//! Energies are stored in eighth units so that the d-eigenvalue
//! d = −∂²/8 + (λ,λ)/4 − Σ m N^a_m − Σ k N^φ_k is an exact integer:
//! a_{−m} contributes 8m, a fermion mode k contributes 8k (so 4 per
//! half-unit of k), and the lattice charge m (in α/2 units, equal to the
//! ∂-eigenvalue) contributes m² − c where c makes the highest weight
//! vector of each module sit at energy zero.

use crate::scalars::{eta, q_int, Half, Scalar};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    NS,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModuleTag {
    TwoLambda0,
    TwoLambda1,
    Lambda0Lambda1,
}

impl fmt::Display for ModuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleTag::TwoLambda0 => write!(f, "V(2L0)"),
            ModuleTag::TwoLambda1 => write!(f, "V(2L1)"),
            ModuleTag::Lambda0Lambda1 => write!(f, "V(L0+L1)"),
        }
    }
}

impl ModuleTag {
    pub fn sector(self) -> Sector {
        match self {
            ModuleTag::Lambda0Lambda1 => Sector::R,
            _ => Sector::NS,
        }
    }

    /// 8·(λ,λ)/4 − adjusted so each highest weight vector has energy 0:
    /// equals the charge² of the highest weight vector.
    pub(crate) fn c8(self) -> i64 {
        match self {
            ModuleTag::TwoLambda0 => 0,
            ModuleTag::TwoLambda1 => 4,
            ModuleTag::Lambda0Lambda1 => 1,
        }
    }

    pub fn hw_charge(self) -> i64 {
        match self {
            ModuleTag::TwoLambda0 => 0,
            ModuleTag::TwoLambda1 => 2,
            ModuleTag::Lambda0Lambda1 => 1,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FockError {
    #[error("fermion mode {half}/2 does not match sector {sector:?}")]
    SectorMismatch { half: i64, sector: Sector },
    #[error("state does not satisfy the parity rule of any level-two module")]
    NoModule,
}

/// One basis vector: boson partition ⊗ fermion mode set ⊗ lattice charge.
///
/// Fermion modes are the occupied creation modes in half units (mode k is
/// stored as 2k), strictly decreasing, positive: odd values in the NS
/// sector, even values ≥ 2 in the R sector.  The R zero mode is not stored;
/// φ_0 acts diagonally with φ_0|R⟩ = |R⟩.  The lattice charge m is the
/// coefficient of α/2, equal to the ∂-eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    pub bosons: Vec<(u32, u32)>,
    pub sector: Sector,
    pub fermions: Vec<i64>,
    pub charge: i64,
}

impl BasisState {
    pub fn vacuum(sector: Sector, charge: i64) -> BasisState {
        BasisState {
            bosons: Vec::new(),
            sector,
            fermions: Vec::new(),
            charge,
        }
    }

    pub fn highest_weight(tag: ModuleTag) -> BasisState {
        BasisState::vacuum(tag.sector(), tag.hw_charge())
    }

    /// ∂-eigenvalue.
    pub fn weight(&self) -> i64 {
        self.charge
    }

    /// charge² + 8·(boson energy) + 8·(fermion energy), in eighth units;
    /// the module-independent part of −8d.
    pub fn raw_energy8(&self) -> i64 {
        let b: i64 = self.bosons.iter().map(|&(m, j)| m as i64 * j as i64).sum();
        let f: i64 = self.fermions.iter().sum();
        self.charge * self.charge + 8 * b + 4 * f
    }

    /// Which level-two module this state belongs to, from its sector,
    /// charge class, and fermion-number parity.
    pub fn module_tag(&self) -> Result<ModuleTag, FockError> {
        match self.sector {
            Sector::R => {
                if self.charge.rem_euclid(2) == 1 {
                    Ok(ModuleTag::Lambda0Lambda1)
                } else {
                    Err(FockError::NoModule)
                }
            }
            Sector::NS => {
                if self.charge.rem_euclid(2) != 0 {
                    return Err(FockError::NoModule);
                }
                let even_fermions = self.fermions.len() % 2 == 0;
                let charge_class0 = self.charge.rem_euclid(4) == 0;
                if even_fermions == charge_class0 {
                    Ok(ModuleTag::TwoLambda0)
                } else {
                    Ok(ModuleTag::TwoLambda1)
                }
            }
        }
    }

    /// −8d, the energy above the highest weight vector in eighth units;
    /// requires the state to lie in one of the three modules.
    pub fn energy8(&self) -> Result<i64, FockError> {
        Ok(self.raw_energy8() - self.module_tag()?.c8())
    }

    /// d-eigenvalue as (numerator, 8).
    pub fn grade_eighths(&self) -> Result<i64, FockError> {
        Ok(-self.energy8()?)
    }
}

/// Finite Scalar-linear combination of basis states.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedVector(pub BTreeMap<BasisState, Scalar>);

impl GradedVector {
    pub fn zero() -> GradedVector {
        GradedVector(BTreeMap::new())
    }

    pub fn basis(s: BasisState) -> GradedVector {
        let mut v = GradedVector::zero();
        v.add_term(s, Scalar::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, s: BasisState, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(s) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, rhs: &GradedVector, c: &Scalar) {
        for (s, a) in &rhs.0 {
            self.add_term(s.clone(), a * c);
        }
    }

    pub fn add_assign(&mut self, rhs: &GradedVector) {
        for (s, a) in &rhs.0 {
            self.add_term(s.clone(), a.clone());
        }
    }

    pub fn scale(&self, c: &Scalar) -> GradedVector {
        let mut out = GradedVector::zero();
        for (s, a) in &self.0 {
            out.add_term(s.clone(), a * c);
        }
        out
    }

    pub fn neg(&self) -> GradedVector {
        self.scale(&-Scalar::one())
    }

    pub fn sub(&self, rhs: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }

    pub fn coeff(&self, s: &BasisState) -> Scalar {
        self.0.get(s).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Apply a per-state linear map.
    pub fn apply<F>(&self, mut f: F) -> GradedVector
    where
        F: FnMut(&BasisState) -> GradedVector,
    {
        let mut out = GradedVector::zero();
        for (s, c) in &self.0 {
            out.add_scaled(&f(s), c);
        }
        out
    }

    /// Drop every state whose raw energy exceeds the cap.
    pub fn truncate_raw(&self, cap8: i64) -> GradedVector {
        let mut out = GradedVector::zero();
        for (s, c) in &self.0 {
            if s.raw_energy8() <= cap8 {
                out.add_term(s.clone(), c.clone());
            }
        }
        out
    }
}

impl crate::series::Coeff for GradedVector {
    fn czero() -> Self {
        GradedVector::zero()
    }
    fn cis_zero(&self) -> bool {
        self.is_zero()
    }
    fn cadd_assign(&mut self, other: &Self) {
        self.add_assign(other);
    }
    fn cmul_scalar(&self, s: &Scalar) -> Self {
        self.scale(s)
    }
}

/// a_m for m ≠ 0: negative m creates, positive m annihilates with the
/// factor mult·[2m]²/m from [a_m, a_{−m}] = [2m]²/m.
pub fn boson_act(m: i64, s: &BasisState) -> GradedVector {
    assert!(m != 0, "a_0 is not a mode of the Heisenberg algebra");
    if m < 0 {
        let mode = (-m) as u32;
        let mut t = s.clone();
        match t.bosons.binary_search_by_key(&mode, |&(mm, _)| mm) {
            Ok(i) => t.bosons[i].1 += 1,
            Err(i) => t.bosons.insert(i, (mode, 1)),
        }
        GradedVector::basis(t)
    } else {
        let mode = m as u32;
        let mut t = s.clone();
        match t.bosons.binary_search_by_key(&mode, |&(mm, _)| mm) {
            Ok(i) => {
                let mult = t.bosons[i].1;
                if mult == 1 {
                    t.bosons.remove(i);
                } else {
                    t.bosons[i].1 -= 1;
                }
                let c = Scalar::from_int(mult as i64)
                    * q_int(2 * m).pow(2)
                    * Scalar::from_rational(1, m);
                GradedVector::basis(t).scale(&c)
            }
            Err(_) => GradedVector::zero(),
        }
    }
}

/// φ_{h/2} in half units: negative h creates mode |h|/2, positive h
/// annihilates with the factor η_{h/2}, h = 0 is the R-sector zero mode
/// acting as (−1)^{#occupied modes}.  Signs come from anticommuting the
/// operator into the ordered normal form.
pub fn fermion_act(h: i64, s: &BasisState) -> Result<GradedVector, FockError> {
    let parity_ok = match s.sector {
        Sector::NS => h.rem_euclid(2) == 1,
        Sector::R => h.rem_euclid(2) == 0,
    };
    if !parity_ok {
        return Err(FockError::SectorMismatch {
            half: h,
            sector: s.sector,
        });
    }
    if h == 0 {
        let sign = if s.fermions.len() % 2 == 0 { 1 } else { -1 };
        return Ok(GradedVector::basis(s.clone()).scale(&Scalar::from_int(sign)));
    }
    let mode = h.abs();
    let pos = s.fermions.partition_point(|&x| x > mode);
    let sign = if pos % 2 == 0 { 1 } else { -1 };
    if h < 0 {
        if s.fermions.get(pos) == Some(&mode) {
            return Ok(GradedVector::zero());
        }
        let mut t = s.clone();
        t.fermions.insert(pos, mode);
        Ok(GradedVector::basis(t).scale(&Scalar::from_int(sign)))
    } else {
        if s.fermions.get(pos) != Some(&mode) {
            return Ok(GradedVector::zero());
        }
        let mut t = s.clone();
        t.fermions.remove(pos);
        let c = Scalar::from_int(sign) * eta(Half(mode));
        Ok(GradedVector::basis(t).scale(&c))
    }
}

/// e^{(delta/2)·α}: shifts the lattice charge by delta (α/2 units).
pub fn lattice_act(delta: i64, s: &BasisState) -> BasisState {
    let mut t = s.clone();
    t.charge += delta;
    t
}

/// K^j = q^{j∂} eigenvalue on a basis state.
pub fn k_pow(j: i64, s: &BasisState) -> Scalar {
    Scalar::q_pow(j * s.charge)
}

/// All basis states of a module with energy ≤ L (energy8 ≤ 8L), in the
/// canonical order of BasisState's derived Ord.
pub fn module_basis(tag: ModuleTag, level: i64) -> Vec<BasisState> {
    let cap8 = 8 * level;
    let mut out = Vec::new();
    let sector = tag.sector();
    let mut charge = 0i64;
    loop {
        let charges: Vec<i64> = if charge == 0 {
            vec![0]
        } else {
            vec![charge, -charge]
        };
        let mut any = false;
        for &c in &charges {
            let lattice8 = c * c - tag.c8();
            if lattice8 > cap8 {
                continue;
            }
            any = true;
            let budget = cap8 - lattice8;
            for fermions in fermion_subsets(sector, budget) {
                let st_parity = BasisState {
                    bosons: Vec::new(),
                    sector,
                    fermions: fermions.clone(),
                    charge: c,
                };
                if st_parity.module_tag() != Ok(tag) {
                    continue;
                }
                let f8: i64 = fermions.iter().map(|&h| 4 * h).sum();
                for bosons in boson_partitions((budget - f8) / 8) {
                    out.push(BasisState {
                        bosons,
                        sector,
                        fermions: fermions.clone(),
                        charge: c,
                    });
                }
            }
        }
        if !any && charge * charge > cap8 + tag.c8() {
            break;
        }
        charge += 1;
    }
    out.sort();
    out
}

/// All partitions with Σ m·mult = total exactly.
pub(crate) fn partitions_of(total: i64) -> Vec<Vec<(u32, u32)>> {
    boson_partitions(total)
        .into_iter()
        .filter(|p| p.iter().map(|&(m, j)| m as i64 * j as i64).sum::<i64>() == total)
        .collect()
}

/// All partitions with Σ m·mult ≤ budget, as sorted (mode, mult) lists.
fn boson_partitions(budget: i64) -> Vec<Vec<(u32, u32)>> {
    fn rec(max_mode: i64, budget: i64, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        out.push(cur.iter().rev().cloned().collect());
        for m in (1..=max_mode.min(budget)).rev() {
            let mut mult = 0u32;
            let mut used = 0;
            while used + m <= budget {
                mult += 1;
                used += m;
                cur.push((m as u32, mult));
                rec(m - 1, budget - used, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    if budget >= 0 {
        rec(budget, budget, &mut cur, &mut out);
    }
    out
}

/// All strictly decreasing positive mode sets of the sector with
/// 4·Σ h ≤ budget8.
fn fermion_subsets(sector: Sector, budget8: i64) -> Vec<Vec<i64>> {
    let step = 2;
    let start = match sector {
        Sector::NS => 1,
        Sector::R => 2,
    };
    let mut modes = Vec::new();
    let mut h = start;
    while 4 * h <= budget8 {
        modes.push(h);
        h += step;
    }
    let mut out = Vec::new();
    let n = modes.len();
    for mask in 0u32..(1 << n) {
        let mut set: Vec<i64> = Vec::new();
        let mut e8 = 0;
        for (i, &m) in modes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                set.push(m);
                e8 += 4 * m;
            }
        }
        if e8 <= budget8 {
            set.sort_by(|a, b| b.cmp(a));
            out.push(set);
        }
    }
    out
}

/// Independent dimension count per energy level from generating functions:
/// partitions for the bosons, distinct-mode subsets for the fermions, and
/// the lattice sum with the parity rule, all convolved in eighth units.
pub fn character_oracle(tag: ModuleTag, level: i64) -> Vec<u64> {
    let cap8 = (8 * level) as usize;
    // a negative lattice contribution (down to -c8) lets the oscillators
    // carry that much extra energy at the cap
    let ext = cap8 + tag.c8().max(0) as usize;
    // bosons: Π_m 1/(1 - x^{8m})
    let mut boson = vec![0u64; ext + 1];
    boson[0] = 1;
    for m in 1..=(ext / 8).max(0) {
        for e in 8 * m..=ext {
            boson[e] += boson[e - 8 * m];
        }
    }
    // fermions, split by parity: Π_h (1 + y x^{4h})
    let start = match tag.sector() {
        Sector::NS => 1,
        Sector::R => 2,
    };
    let mut ferm = vec![[0u64; 2]; ext + 1];
    ferm[0][0] = 1;
    let mut h = start;
    while 4 * h <= ext as i64 {
        let step = (4 * h) as usize;
        for e in (step..=ext).rev() {
            let prev = ferm[e - step];
            ferm[e][0] += prev[1];
            ferm[e][1] += prev[0];
        }
        h += 2;
    }
    // lattice charges admitted per fermion parity
    let mut out = vec![0u64; cap8 + 1];
    let mut charge = -(8 * level + 4);
    while charge <= 8 * level + 4 {
        let lattice8 = charge * charge - tag.c8();
        if lattice8 <= cap8 as i64 {
            let parities: Vec<usize> = match tag {
                ModuleTag::Lambda0Lambda1 => {
                    if charge.rem_euclid(2) == 1 {
                        vec![0, 1]
                    } else {
                        vec![]
                    }
                }
                ModuleTag::TwoLambda0 => match charge.rem_euclid(4) {
                    0 => vec![0],
                    2 => vec![1],
                    _ => vec![],
                },
                ModuleTag::TwoLambda1 => match charge.rem_euclid(4) {
                    0 => vec![1],
                    2 => vec![0],
                    _ => vec![],
                },
            };
            for p in parities {
                for eb in 0..=ext {
                    for ef in 0..=ext - eb {
                        let tot = lattice8 + (eb + ef) as i64;
                        if (0..=cap8 as i64).contains(&tot) {
                            out[tot as usize] += boson[eb] * ferm[ef][p];
                        }
                    }
                }
            }
        }
        charge += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Half;

    #[test]
    fn highest_weight_vectors() {
        for tag in [
            ModuleTag::TwoLambda0,
            ModuleTag::TwoLambda1,
            ModuleTag::Lambda0Lambda1,
        ] {
            let hw = BasisState::highest_weight(tag);
            assert_eq!(hw.module_tag(), Ok(tag));
            assert_eq!(hw.energy8(), Ok(0), "grade 0 on {tag}");
        }
        assert_eq!(
            module_basis(ModuleTag::TwoLambda0, 0),
            vec![BasisState::highest_weight(ModuleTag::TwoLambda0)]
        );
        // top levels are the expected sl2 modules: trivial for 2Λ0,
        // spin 1/2 (charges ±1) for Λ0+Λ1, spin 1 for 2Λ1
        assert_eq!(
            module_basis(ModuleTag::Lambda0Lambda1, 0),
            vec![
                BasisState::vacuum(Sector::R, -1),
                BasisState::vacuum(Sector::R, 1),
            ]
        );
        let top1 = module_basis(ModuleTag::TwoLambda1, 0);
        assert_eq!(top1.len(), 3);
        let weights: Vec<i64> = top1.iter().map(|s| s.weight()).collect();
        assert_eq!(
            {
                let mut w = weights.clone();
                w.sort();
                w
            },
            vec![-2, 0, 2]
        );
    }

    #[test]
    fn boson_commutator() {
        let hw = BasisState::highest_weight(ModuleTag::TwoLambda0);
        assert!(boson_act(1, &hw).is_zero());
        // a_1 a_{-1}|vac⟩ = [2]²|vac⟩
        let v = boson_act(-1, &hw).apply(|s| boson_act(1, s));
        assert_eq!(v, GradedVector::basis(hw.clone()).scale(&q_int(2).pow(2)));
        // [a_2, a_{-2}] = [4]²/2 on every basis state at L = 3
        let c = q_int(4).pow(2) * Scalar::from_rational(1, 2);
        for s in module_basis(ModuleTag::Lambda0Lambda1, 3) {
            let v = GradedVector::basis(s.clone());
            let ab = v.apply(|t| boson_act(-2, t)).apply(|t| boson_act(2, t));
            let ba = v.apply(|t| boson_act(2, t)).apply(|t| boson_act(-2, t));
            assert_eq!(ab.sub(&ba), v.scale(&c));
        }
    }

    #[test]
    fn fermion_anticommutators() {
        // {φ_m, φ_n} = δ_{m+n,0} η_m on a window of states, both sectors
        for tag in [ModuleTag::TwoLambda0, ModuleTag::Lambda0Lambda1] {
            let modes: Vec<i64> = match tag.sector() {
                Sector::NS => vec![-3, -1, 1, 3],
                Sector::R => vec![-4, -2, 0, 2, 4],
            };
            for s in module_basis(tag, 2) {
                let v = GradedVector::basis(s.clone());
                for &a in &modes {
                    for &b in &modes {
                        let ab = v
                            .apply(|t| fermion_act(b, t).expect("sector"))
                            .apply(|t| fermion_act(a, t).expect("sector"));
                        let ba = v
                            .apply(|t| fermion_act(a, t).expect("sector"))
                            .apply(|t| fermion_act(b, t).expect("sector"));
                        let mut anti = ab;
                        anti.add_assign(&ba);
                        let expect = if a + b == 0 {
                            v.scale(&eta(Half(a)))
                        } else {
                            GradedVector::zero()
                        };
                        assert_eq!(anti, expect, "{{φ_{a}/2, φ_{b}/2}} on {s:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn ramond_zero_mode() {
        let hw = BasisState::highest_weight(ModuleTag::Lambda0Lambda1);
        let v = GradedVector::basis(hw.clone());
        assert_eq!(v.apply(|t| fermion_act(0, t).expect("R")), v);
        // φ_0 picks up (−1)^{#modes} on excited states
        let ex = v.apply(|t| fermion_act(-2, t).expect("R"));
        assert_eq!(ex.apply(|t| fermion_act(0, t).expect("R")), ex.neg());
    }

    #[test]
    fn pauli_exclusion() {
        let hw = BasisState::highest_weight(ModuleTag::TwoLambda0);
        let once = fermion_act(-1, &hw).expect("NS");
        assert!(once.apply(|t| fermion_act(-1, t).expect("NS")).is_zero());
        // φ_{1/2} φ_{-1/2} |NS⟩ = η_{1/2} |NS⟩
        let v = once.apply(|t| fermion_act(1, t).expect("NS"));
        assert_eq!(v, GradedVector::basis(hw).scale(&eta(Half(1))));
    }

    #[test]
    fn weight_and_grade_bookkeeping() {
        let hw = BasisState::highest_weight(ModuleTag::TwoLambda1);
        assert_eq!(hw.weight(), 2);
        assert_eq!(lattice_act(2, &hw).weight(), 4);
        assert_eq!(k_pow(1, &hw), Scalar::q_pow(2));
        // a_{-1} lowers the grade by exactly 1
        let ex = boson_act(-1, &hw);
        let s = ex.0.keys().next().expect("one state");
        assert_eq!(s.energy8(), Ok(8));
        // e^{α} and e^{-α} on the 2Λ0 highest weight sit at the same energy
        let hw0 = BasisState::highest_weight(ModuleTag::TwoLambda0);
        assert_eq!(
            lattice_act(2, &hw0).raw_energy8(),
            lattice_act(-2, &hw0).raw_energy8()
        );
    }

    #[test]
    fn parity_rule_on_enumerated_bases() {
        for tag in [ModuleTag::TwoLambda0, ModuleTag::TwoLambda1] {
            for s in module_basis(tag, 4) {
                assert_eq!(s.module_tag(), Ok(tag));
                let even = s.fermions.len() % 2 == 0;
                let class0 = s.charge.rem_euclid(4) == 0;
                match tag {
                    ModuleTag::TwoLambda0 => assert_eq!(even, class0),
                    ModuleTag::TwoLambda1 => assert_ne!(even, class0),
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn dimensions_match_character_oracle() {
        for tag in [
            ModuleTag::TwoLambda0,
            ModuleTag::TwoLambda1,
            ModuleTag::Lambda0Lambda1,
        ] {
            let basis = module_basis(tag, 4);
            let oracle = character_oracle(tag, 4);
            let mut histogram = vec![0u64; oracle.len()];
            for s in &basis {
                histogram[s.energy8().expect("valid state") as usize] += 1;
            }
            assert_eq!(histogram, oracle, "dimension counts on {tag}");
        }
    }
}
