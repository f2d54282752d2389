use super::dense::{CMatrix, DenseLu};
use super::{apply_r0, green0_entry, FreeResolvent, Side};
use crate::error::Result;
use crate::lattice::{Amp4, Chirality, CoinField, Field, Site, SparseField};
use nalgebra::Matrix4;
use num_complex::Complex64;
use std::collections::HashMap;

/// `I + V R0(θ±i0)` restricted to the range of `V`, factored once.
///
/// The range of `V = S(C - I)` is spanned by the pairs `(x, p)` with
/// `x + source_offset(p)` in the coin support; they are ordered
/// lexicographically by `(x1, x2, chirality)`.
#[derive(Clone, Debug)]
pub struct BoundarySystem {
    theta: f64,
    side: Side,
    coin: CoinField,
    basis: Vec<(Site, Chirality)>,
    index: HashMap<(Site, Chirality), usize>,
    matrix: CMatrix,
    lu: DenseLu,
}

fn coin_minus_identity(c: &CoinField, z: Site) -> Matrix4<Complex64> {
    c.at(z) - Matrix4::identity()
}

pub fn v_range_basis(c: &CoinField) -> Vec<(Site, Chirality)> {
    let mut basis: Vec<(Site, Chirality)> = c
        .sites()
        .flat_map(|z| Chirality::ALL.map(|p| (z - p.source_offset(), p)))
        .collect();
    basis.sort();
    basis
}

pub fn assemble_boundary_system(c: &CoinField, theta: f64, side: Side) -> Result<BoundarySystem> {
    let basis = v_range_basis(c);
    let n = basis.len();
    let deltas: Vec<Matrix4<Complex64>> = basis
        .iter()
        .map(|(x, p)| coin_minus_identity(c, *x + p.source_offset()))
        .collect();
    let matrix = CMatrix::from_fn(n, n, |j, k| {
        let (xj, pj) = basis[j];
        let (xk, pk) = basis[k];
        let z = xj + pj.source_offset();
        let mut m = deltas[j][(pj.index(), pk.index())] * green0_entry(z - xk, pk, theta, side);
        if j == k {
            m += 1.0;
        }
        m
    });
    let lu = DenseLu::factor(&matrix)?;
    let index = basis.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    Ok(BoundarySystem {
        theta,
        side,
        coin: c.clone(),
        basis,
        index,
        matrix,
        lu,
    })
}

impl BoundarySystem {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn coin(&self) -> &CoinField {
        &self.coin
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(Site, Chirality)] {
        &self.basis
    }

    pub fn basis_index(&self, x: Site, p: Chirality) -> Option<usize> {
        self.index.get(&(x, p)).copied()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn condition(&self) -> f64 {
        self.lu.condition()
    }

    /// `V u` sampled on the basis, for any field `u`.
    pub fn v_on_basis(&self, u: &dyn Field) -> CMatrix {
        let mut cache: HashMap<Site, Amp4> = HashMap::new();
        CMatrix::from_fn(self.dim(), 1, |j, _| {
            let (x, p) = self.basis[j];
            let z = x + p.source_offset();
            let uz = *cache.entry(z).or_insert_with(|| u.eval(z));
            let d = coin_minus_identity(&self.coin, z);
            (0..4).map(|q| d[(p.index(), q)] * uz[q]).sum()
        })
    }

    fn to_sparse(&self, g: &CMatrix) -> SparseField {
        let mut out = SparseField::new();
        for (j, (x, p)) in self.basis.iter().enumerate() {
            let v = g[(j, 0)];
            if v != Complex64::new(0.0, 0.0) {
                let mut a = crate::lattice::ZERO4;
                a[p.index()] = v;
                out.add_at(*x, a);
            }
        }
        out
    }

    /// `g = V R(θ±i0) f`, obtained from `(I + V R0) g = V R0 f`.
    pub fn v_resolvent(&self, f: &SparseField) -> Result<SparseField> {
        let r0f = apply_r0(f, self.theta, self.side);
        let rhs = self.v_on_basis(&r0f);
        let g = self.lu.solve(&rhs)?;
        Ok(self.to_sparse(&g))
    }

    /// `R(θ±i0) f = R0 (f - V R f)`, returned together with `V R f`.
    pub fn apply(&self, f: &SparseField) -> Result<ResolventField> {
        let g = self.v_resolvent(f)?;
        let field = apply_r0(&f.sub(&g), self.theta, self.side);
        Ok(ResolventField { field, v_part: g })
    }
}

/// `R(θ±i0) f` as an evaluator on all of Z².
#[derive(Clone, Debug)]
pub struct ResolventField {
    field: FreeResolvent,
    v_part: SparseField,
}

impl ResolventField {
    /// `V R(θ±i0) f`, supported in the range of `V`.
    pub fn v_part(&self) -> &SparseField {
        &self.v_part
    }
}

impl Field for ResolventField {
    fn eval(&self, x: Site) -> Amp4 {
        self.field.eval(x)
    }
}

/// One-shot `R(θ±i0) f`; assemble a [`BoundarySystem`] instead when applying repeatedly.
pub fn apply_r(c: &CoinField, f: &SparseField, theta: f64, side: Side) -> Result<ResolventField> {
    assemble_boundary_system(c, theta, side)?.apply(f)
}
