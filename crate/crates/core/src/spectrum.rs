//! The fundamental tone: the smallest eigenvalue of the Dirichlet-restricted
//! generalized eigenproblem `K u = λ M u`, together with a dense brute-force
//! oracle over the whole interior spectrum.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryPartition, ImmersedMesh};
use crate::operators::OperatorPair;
use crate::sparse::{conjugate_gradient, SymmetricCsr};

/// How a spectral result was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Shifted inverse iteration with conjugate-gradient inner solves.
    Iterative,
    /// Dense symmetric-definite eigendecomposition.
    Dense,
    /// Closed mesh: constants realize the infimum, tone is exactly zero.
    ClosedTrivial,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::Iterative => "iterative",
            SolveMethod::Dense => "dense",
            SolveMethod::ClosedTrivial => "closed_trivial",
        }
    }
}

/// Solver tuning. Defaults implement the fixed tolerance chain: inner CG at
/// 1e-12 relative residual, outer iteration until the Rayleigh quotient
/// stagnates below 1e-12 relative and the eigenpair residual drops under
/// 1e-9.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub cg_rel_tol: f64,
    pub stagnation_rel_tol: f64,
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 500,
            cg_rel_tol: 1e-12,
            stagnation_rel_tol: 1e-12,
            residual_tol: 1e-9,
        }
    }
}

/// The fundamental tone with its eigenfunction and solver diagnostics.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub tone: f64,
    /// Full-length eigenfunction, zero on boundary vertices, unit mass norm,
    /// sign-normalized so the entry of largest magnitude is positive.
    pub eigenfunction: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub method: SolveMethod,
}

fn mass_dot(mass: &[f64], a: &[f64], b: &[f64]) -> f64 {
    mass.iter()
        .zip(a)
        .zip(b)
        .map(|((m, x), y)| m * x * y)
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual `‖Ku − θMu‖ / ‖Mu‖` on the restricted pencil.
fn pencil_residual(k: &SymmetricCsr, mass: &[f64], u: &[f64], theta: f64) -> f64 {
    let ku = k.matvec(u);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..u.len() {
        let mu = mass[i] * u[i];
        let r = ku[i] - theta * mu;
        num += r * r;
        den += mu * mu;
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// Compute the fundamental tone of a mesh.
///
/// Closed meshes short-circuit: constants lie in the admissible space and
/// realize quotient zero, so the tone is exactly 0 with a constant
/// eigenfunction. Otherwise the pencil is restricted to interior rows and
/// columns (Dirichlet condition by deletion) and the smallest eigenpair is
/// found by inverse iteration from the mass-normalized all-ones vector.
pub fn fundamental_tone(
    mesh: &ImmersedMesh,
    ops: &OperatorPair,
    partition: &BoundaryPartition,
    opts: &SolverOptions,
) -> Result<SpectralResult> {
    mesh.validated()?;
    let n = mesh.vertex_count();

    if partition.is_closed() {
        let total = ops.total_mass();
        let c = 1.0 / total.sqrt();
        return Ok(SpectralResult {
            tone: 0.0,
            eigenfunction: vec![c; n],
            iterations: 0,
            residual: 0.0,
            method: SolveMethod::ClosedTrivial,
        });
    }

    let interior = partition.interior();
    if interior.is_empty() {
        return Err(Error::domain(
            "fundamental tone undefined: mesh has no interior vertices",
        ));
    }

    let k_int = ops.stiffness().restrict(interior);
    let m_int: Vec<f64> = interior.iter().map(|&v| ops.mass()[v]).collect();
    let ni = interior.len();
    let cg_max = 10 * ni + 100;

    let mut u = vec![1.0; ni];
    let norm = mass_dot(&m_int, &u, &u).sqrt();
    for x in u.iter_mut() {
        *x /= norm;
    }

    let mut theta_prev = f64::NAN;
    let mut theta = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut converged_at = None;
    let mut rhs = vec![0.0; ni];
    for it in 1..=opts.max_iterations {
        for i in 0..ni {
            rhs[i] = m_int[i] * u[i];
        }
        let sol = conjugate_gradient(&k_int, &rhs, opts.cg_rel_tol, cg_max);
        let w_norm = mass_dot(&m_int, &sol.x, &sol.x).sqrt();
        if !(w_norm > 0.0) || !w_norm.is_finite() {
            return Err(Error::Convergence {
                iterations: it,
                residual,
            });
        }
        for (ui, wi) in u.iter_mut().zip(&sol.x) {
            *ui = wi / w_norm;
        }
        let ku = k_int.matvec(&u);
        theta = dot(&u, &ku);
        residual = pencil_residual(&k_int, &m_int, &u, theta);
        let stagnated = (theta - theta_prev).abs()
            <= opts.stagnation_rel_tol * theta.abs().max(f64::MIN_POSITIVE);
        if stagnated && residual <= opts.residual_tol {
            converged_at = Some(it);
            break;
        }
        theta_prev = theta;
    }

    let iterations = match converged_at {
        Some(it) => it,
        None => {
            return Err(Error::Convergence {
                iterations: opts.max_iterations,
                residual,
            })
        }
    };

    let mut eigenfunction = vec![0.0; n];
    for (k, &v) in interior.iter().enumerate() {
        eigenfunction[v] = u[k];
    }
    // Sign normalization: the entry of largest magnitude is positive.
    let mut max_idx = 0;
    let mut max_abs = 0.0;
    for (i, &v) in eigenfunction.iter().enumerate() {
        if v.abs() > max_abs {
            max_abs = v.abs();
            max_idx = i;
        }
    }
    if eigenfunction[max_idx] < 0.0 {
        for v in eigenfunction.iter_mut() {
            *v = -*v;
        }
    }

    Ok(SpectralResult {
        tone: theta,
        eigenfunction,
        iterations,
        residual,
        method: SolveMethod::Iterative,
    })
}

/// Every eigenvalue of the interior-restricted pencil, ascending, by dense
/// symmetric eigendecomposition of `M^{-1/2} K M^{-1/2}`. Guarded to at most
/// 2000 interior vertices.
pub fn dense_oracle(ops: &OperatorPair, partition: &BoundaryPartition) -> Result<Vec<f64>> {
    let interior = partition.interior();
    if interior.is_empty() {
        return Err(Error::domain(
            "dense oracle undefined: mesh has no interior vertices",
        ));
    }
    if interior.len() > 2000 {
        return Err(Error::domain(format!(
            "dense oracle guard: {} interior vertices exceed the limit of 2000",
            interior.len()
        )));
    }
    let k_int = ops.stiffness().restrict(interior);
    let inv_sqrt_m: Vec<f64> = interior
        .iter()
        .map(|&v| 1.0 / ops.mass()[v].sqrt())
        .collect();
    let ni = interior.len();
    let mut b = DMatrix::<f64>::zeros(ni, ni);
    for (i, j, v) in k_int.entries() {
        b[(i, j)] = v * inv_sqrt_m[i] * inv_sqrt_m[j];
    }
    // Symmetrize against rounding before the eigensolve.
    let bt = b.transpose();
    let sym = (&b + &bt) * 0.5;
    let eigen = sym.symmetric_eigen();
    let mut values: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GeneratorSpec};
    use crate::operators::{assemble, rayleigh_quotient};

    fn solve(spec: &GeneratorSpec) -> (crate::mesh::ImmersedMesh, OperatorPair, crate::mesh::BoundaryPartition, SpectralResult) {
        let mesh = generate(spec).unwrap();
        let ops = assemble(&mesh).unwrap();
        let partition = mesh.boundary_partition().unwrap();
        let result =
            fundamental_tone(&mesh, &ops, &partition, &SolverOptions::default()).unwrap();
        (mesh, ops, partition, result)
    }

    #[test]
    fn closed_mesh_tone_is_exactly_zero() {
        let (_, ops, _, result) =
            solve(&GeneratorSpec::Icosphere { radius: 1.0, level: 2 });
        assert_eq!(result.tone, 0.0);
        assert_eq!(result.method, SolveMethod::ClosedTrivial);
        let m_norm: f64 = result
            .eigenfunction
            .iter()
            .zip(ops.mass())
            .map(|(u, m)| u * u * m)
            .sum();
        assert!((m_norm - 1.0).abs() < 1e-12);
        let first = result.eigenfunction[0];
        assert!(result.eigenfunction.iter().all(|&v| v == first));
    }

    #[test]
    fn single_interior_vertex_pencil() {
        // One-ring disk: only the center is interior.
        let mesh = generate(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 1 }).unwrap();
        let ops = assemble(&mesh).unwrap();
        let partition = mesh.boundary_partition().unwrap();
        assert_eq!(partition.interior(), &[0]);
        let expected = ops.stiffness().get(0, 0) / ops.mass()[0];
        let result =
            fundamental_tone(&mesh, &ops, &partition, &SolverOptions::default()).unwrap();
        assert!((result.tone - expected).abs() <= 1e-12 * expected);
        let oracle = dense_oracle(&ops, &partition).unwrap();
        assert_eq!(oracle.len(), 1);
        assert!((oracle[0] - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn iterative_matches_dense_oracle() {
        for spec in [
            GeneratorSpec::FlatDisk { radius: 1.0, rings: 8 },
            GeneratorSpec::SphericalCap { radius: 1.0, angle: 1.0, rings: 6 },
            GeneratorSpec::CylinderPatch {
                radius: 0.5,
                height: 1.0,
                segments: 16,
                rows: 6,
            },
        ] {
            let (_, ops, partition, result) = solve(&spec);
            let oracle = dense_oracle(&ops, &partition).unwrap();
            let tol = 1e-8 * oracle[0].max(1.0);
            assert!(
                (result.tone - oracle[0]).abs() <= tol,
                "{:?}: {} vs {}",
                spec,
                result.tone,
                oracle[0]
            );
        }
    }

    #[test]
    fn eigenfunction_invariants_hold() {
        let (_, ops, partition, result) =
            solve(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 8 });
        assert!(result.residual <= 1e-9);
        assert!(result.tone > 0.0);
        assert!(result.iterations >= 1);
        // Unit mass norm.
        let m_norm: f64 = result
            .eigenfunction
            .iter()
            .zip(ops.mass())
            .map(|(u, m)| u * u * m)
            .sum();
        assert!((m_norm - 1.0).abs() < 1e-10);
        // Zero on the boundary.
        for &b in partition.boundary() {
            assert_eq!(result.eigenfunction[b], 0.0);
        }
        // Single sign on the interior (ground state).
        let max_abs = result
            .eigenfunction
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for &i in partition.interior() {
            let v = result.eigenfunction[i];
            assert!(
                v > -1e-12 * max_abs,
                "ground state changes sign at {i}: {v}"
            );
        }
    }

    #[test]
    fn disk_tone_matches_first_bessel_zero() {
        // First Dirichlet eigenvalue of the unit disk is j_{0,1}^2.
        let (_, _, _, result) = solve(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 16 });
        let exact = 5.783185962946785;
        let rel = (result.tone - exact).abs() / exact;
        assert!(rel < 0.02, "tone {} rel err {rel}", result.tone);
    }

    #[test]
    fn tone_scales_inverse_quadratically() {
        let mesh = generate(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 6 }).unwrap();
        let scaled = mesh.scale(2.0).unwrap();
        let partition = mesh.boundary_partition().unwrap();
        let r1 = fundamental_tone(
            &mesh,
            &assemble(&mesh).unwrap(),
            &partition,
            &SolverOptions::default(),
        )
        .unwrap();
        let r2 = fundamental_tone(
            &scaled,
            &assemble(&scaled).unwrap(),
            &partition,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((r2.tone - r1.tone / 4.0).abs() <= 1e-6 * r1.tone);
    }

    #[test]
    fn spectrum_scales_entrywise() {
        let mesh = generate(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 4 }).unwrap();
        let scaled = mesh.scale(2.0).unwrap();
        let partition = mesh.boundary_partition().unwrap();
        let w1 = dense_oracle(&assemble(&mesh).unwrap(), &partition).unwrap();
        let w2 = dense_oracle(&assemble(&scaled).unwrap(), &partition).unwrap();
        for (a, b) in w1.iter().zip(&w2) {
            assert!((b - a / 4.0).abs() <= 1e-9 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn oracle_guard_rejects_large_interiors() {
        let mesh = generate(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 27 }).unwrap();
        let ops = assemble(&mesh).unwrap();
        let partition = mesh.boundary_partition().unwrap();
        assert!(partition.interior().len() > 2000);
        assert!(matches!(
            dense_oracle(&ops, &partition),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn nonconvergence_is_reported() {
        let mesh = generate(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 6 }).unwrap();
        let ops = assemble(&mesh).unwrap();
        let partition = mesh.boundary_partition().unwrap();
        let opts = SolverOptions {
            max_iterations: 1,
            ..SolverOptions::default()
        };
        match fundamental_tone(&mesh, &ops, &partition, &opts) {
            Err(Error::Convergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual.is_finite());
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn empty_interior_is_domain_error() {
        let mesh = crate::mesh::ImmersedMesh::new(
            3,
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let ops = assemble(&mesh).unwrap();
        let partition = mesh.boundary_partition().unwrap();
        assert!(matches!(
            fundamental_tone(&mesh, &ops, &partition, &SolverOptions::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn min_max_principle() {
        let (mesh, ops, partition, result) =
            solve(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 6 });
        // Radial hat function.
        let f: Vec<f64> = (0..mesh.vertex_count())
            .map(|v| {
                let p = mesh.position(v);
                1.0 - (p[0] * p[0] + p[1] * p[1]).sqrt()
            })
            .collect();
        let rq = rayleigh_quotient(&ops, &partition, &f).unwrap();
        assert!(rq.value >= result.tone - 1e-10);
        assert!(rq.value <= 7.0);
        // The eigenfunction itself achieves the tone.
        let rq_eig = rayleigh_quotient(&ops, &partition, &result.eigenfunction).unwrap();
        assert!((rq_eig.value - result.tone).abs() <= 1e-10 * result.tone.max(1.0));
    }

    #[test]
    fn domain_monotonicity_within_generator_family() {
        let big = generate(&GeneratorSpec::FlatDisk { radius: 1.0, rings: 6 }).unwrap();
        let small = generate(&GeneratorSpec::FlatDisk { radius: 0.8, rings: 6 }).unwrap();
        let pb = big.boundary_partition().unwrap();
        let ps = small.boundary_partition().unwrap();
        let tb = fundamental_tone(&big, &assemble(&big).unwrap(), &pb, &SolverOptions::default())
            .unwrap();
        let ts = fundamental_tone(
            &small,
            &assemble(&small).unwrap(),
            &ps,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(ts.tone > tb.tone);
    }
}
