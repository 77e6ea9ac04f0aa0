use super::{check_time, validate_grid, Propagator, ScenarioPair, WitnessSurface};
use crate::error::Result;
use crate::qla::{self, hermitian_eigensystem, tensor_vector, ComplexMatrix, ComplexVector, Subsystem};
use crate::states::reduce_ensemble;

type Weighted = Vec<(f64, ComplexVector)>;

/// Evaluates witnesses from state vectors expressed in the propagator
/// eigenbasis, so every evolution is a phase multiply plus one basis change.
///
/// By linearity the reduced `F` operator at `t + t'` is the propagated
/// `(ρ¹_S − ρ²_S)(t) ⊗ ρ¹_E(t)`, and the reduced `B` operator is the actual
/// reduced difference at `t + t'` minus that term.
struct PairEvaluator<'a> {
    prop: &'a Propagator,
    ds: usize,
    de: usize,
    coords: [Weighted; 2],
}

impl<'a> PairEvaluator<'a> {
    fn new(sc: &'a ScenarioPair) -> Self {
        let prop = sc.propagator.as_ref();
        let to_coords = |ens: &[(f64, ComplexVector)]| -> Weighted {
            ens.iter().map(|(w, v)| (*w, prop.to_eigenbasis(v))).collect()
        };
        Self {
            prop,
            ds: sc.ds(),
            de: sc.de(),
            coords: [to_coords(sc.state1.ensemble()), to_coords(sc.state2.ensemble())],
        }
    }

    fn evolve(&self, coords: &[(f64, ComplexVector)], t: f64) -> Weighted {
        coords.iter().map(|(w, c)| (*w, self.prop.evolve_from_eigenbasis(c, t))).collect()
    }

    fn reduced(&self, ens: &[(f64, ComplexVector)]) -> ComplexMatrix {
        reduce_ensemble(ens, self.ds, self.de, Subsystem::System)
    }

    /// `ρ¹_S(t) − ρ²_S(t)`
    fn reduced_difference(&self, t: f64) -> ComplexMatrix {
        self.reduced(&self.evolve(&self.coords[0], t)) - self.reduced(&self.evolve(&self.coords[1], t))
    }

    /// `Σ_k w_k Tr_E |v_k⟩⟨v_k|` over consecutive columns from `start`.
    fn reduce_columns(&self, cols: &ComplexMatrix, start: usize, weights: impl Iterator<Item = f64>) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.ds, self.ds);
        for (k, w) in weights.enumerate() {
            let v = cols.column(start + k);
            for s in 0..self.ds {
                let row = v.rows(s * self.de, self.de);
                for sp in s..self.ds {
                    let z = v.rows(sp * self.de, self.de).dotc(&row) * w;
                    out[(s, sp)] += z;
                    if sp != s {
                        out[(sp, s)] += z.conj();
                    }
                }
            }
        }
        out
    }

    fn row(&self, t: f64, tprimes: &[f64]) -> Result<Vec<[f64; 4]>> {
        let first = self.evolve(&self.coords[0], t);
        let second = self.evolve(&self.coords[1], t);
        let diff = self.reduced(&first) - self.reduced(&second);
        let d_t = 0.5 * qla::trace_norm_unchecked(&diff);

        // Rank-one terms of (ρ¹_S − ρ²_S) ⊗ ρ¹_E with ρ¹_E = Σ_k Σ_s w_k |v_k^s⟩⟨v_k^s|,
        // v_k^s being the environment block of component k at system index s.
        let diff_eig = hermitian_eigensystem(&qla::symmetrize(&diff))?;
        let mut terms: Weighted = Vec::new();
        for (a, &mu) in diff_eig.eigenvalues.iter().enumerate() {
            if mu == 0.0 {
                continue;
            }
            let x = diff_eig.eigenvectors.column(a).into_owned();
            for (w, v) in &first {
                for s in 0..self.ds {
                    let block = v.rows(s * self.de, self.de).into_owned();
                    if block.norm_squared() == 0.0 {
                        continue;
                    }
                    terms.push((mu * w, self.prop.to_eigenbasis(&tensor_vector(&x, &block))));
                }
            }
        }

        let mut out = Vec::with_capacity(tprimes.len());
        for &tprime in tprimes {
            // Columns: F terms after t', then both branches at t + t'.
            let items: Vec<(&ComplexVector, f64)> = terms
                .iter()
                .map(|(_, c)| (c, tprime))
                .chain(self.coords.iter().flatten().map(|(_, c)| (c, t + tprime)))
                .collect();
            let cols = self.prop.evolve_batch(&items);
            let (n_terms, n_first) = (terms.len(), self.coords[0].len());
            let f_op = self.reduce_columns(&cols, 0, terms.iter().map(|(w, _)| *w));
            let diff_plus = self.reduce_columns(&cols, n_terms, self.coords[0].iter().map(|(w, _)| *w))
                - self.reduce_columns(&cols, n_terms + n_first, self.coords[1].iter().map(|(w, _)| *w));
            let f = 0.5 * qla::trace_norm_unchecked(&f_op);
            let b = 0.5 * qla::trace_norm_unchecked(&(&diff_plus - &f_op));
            let d_tplus = 0.5 * qla::trace_norm_unchecked(&diff_plus);
            out.push([d_t, d_tplus, f, b]);
        }
        Ok(out)
    }
}

/// Evaluates `D`, `F`, `B` and `ΔD` on the full grid and classifies every
/// point with margin `eps`. Rows are evaluated in parallel.
pub fn surface(sc: &ScenarioPair, t_grid: &[f64], tprime_grid: &[f64], eps: f64) -> Result<WitnessSurface> {
    let eval = PairEvaluator::new(sc);
    WitnessSurface::build(t_grid, tprime_grid, eps, |t| eval.row(t, tprime_grid))
}

/// `D(t)` at each of `times`.
pub fn trace_distance_series(sc: &ScenarioPair, times: &[f64]) -> Result<Vec<f64>> {
    validate_grid(times, "time")?;
    let eval = PairEvaluator::new(sc);
    times
        .iter()
        .map(|&t| {
            check_time(t, "t")?;
            Ok(0.5 * qla::trace_norm_unchecked(&eval.reduced_difference(t)))
        })
        .collect()
}
