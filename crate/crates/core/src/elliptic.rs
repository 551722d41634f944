//! The Sturm–Liouville operator `A u = -(a u')' + c u` on `(0, L)` with
//! homogeneous Dirichlet conditions: lumped-mass linear finite elements,
//! eigenpairs, and conormal boundary derivatives.

use std::path::Path;

use crate::linalg::symmetric_tridiagonal_eigen;
use crate::{Error, Result};

/// Uniform grid `x_j = j h`, `j = 0..=M`, `h = L / M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    cells: usize,
}

impl SpatialGrid {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!("interval length must be positive, got {length}")));
        }
        if cells < 2 {
            return Err(Error::GridTooCoarse(format!("need at least 2 cells, got {cells}")));
        }
        Ok(Self { length, cells })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of cells `M`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Number of nodes `M + 1`.
    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.cells {
            self.length
        } else {
            j as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.cells).map(move |j| self.node(j))
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.len()];
        w[0] = 0.5 * h;
        w[self.cells] = 0.5 * h;
        w
    }

    /// `(u, v)_{L²(Ω)}` by the trapezoid rule.
    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        let h = self.h();
        let n = self.cells;
        let mut s = 0.5 * (u[0] * v[0] + u[n] * v[n]);
        for j in 1..n {
            s += u[j] * v[j];
        }
        h * s
    }
}

/// Node samples of the diffusion coefficient `a` and reaction `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    a: Vec<f64>,
    c: Vec<f64>,
    mu: f64,
    profile: String,
}

impl Coefficients {
    pub fn new(a: Vec<f64>, c: Vec<f64>, mu: f64) -> Result<Self> {
        Self::with_profile(a, c, mu, "custom")
    }

    fn with_profile(a: Vec<f64>, c: Vec<f64>, mu: f64, profile: &str) -> Result<Self> {
        if a.len() != c.len() {
            return Err(Error::GridMismatch("a and c sample counts differ".into()));
        }
        if !(mu > 0.0) {
            return Err(Error::Domain(format!("ellipticity floor must be positive, got {mu}")));
        }
        if let Some((node, &value)) = a.iter().enumerate().find(|(_, v)| !(**v >= mu)) {
            return Err(Error::Ellipticity { node, value, mu });
        }
        if let Some((j, v)) = c.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("reaction coefficient negative at node {j}: {v}")));
        }
        Ok(Self { a, c, mu, profile: profile.to_string() })
    }

    pub fn from_fn(grid: &SpatialGrid, a: impl Fn(f64) -> f64, c: impl Fn(f64) -> f64, mu: f64) -> Result<Self> {
        Self::new(grid.nodes().map(a).collect(), grid.nodes().map(c).collect(), mu)
    }

    /// `a ≡ 1`, `c ≡ 0`.
    pub fn constant(grid: &SpatialGrid) -> Self {
        Self::with_profile(vec![1.0; grid.len()], vec![0.0; grid.len()], 1.0, "constant")
            .expect("constant profile is admissible")
    }

    /// `a(x) = 1 + x / (2L)`, `c(x) = 1 + sin²(πx/L)`, `μ = 1`.
    pub fn variable1(grid: &SpatialGrid) -> Self {
        let l = grid.length();
        let a = grid.nodes().map(|x| 1.0 + x / (2.0 * l)).collect();
        let c = grid
            .nodes()
            .map(|x| 1.0 + (std::f64::consts::PI * x / l).sin().powi(2))
            .collect();
        Self::with_profile(a, c, 1.0, "variable1").expect("variable1 profile is admissible")
    }

    /// Two-column CSV (`a,c`), one row per node; `#` lines and a non-numeric
    /// header are skipped. `μ` is the smallest sample of `a`.
    pub fn from_csv(path: &Path, grid: &SpatialGrid) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut a = Vec::new();
        let mut c = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(Error::Config(format!("coefficient row needs two columns: {line}")));
            }
            match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    a.push(x);
                    c.push(y);
                }
                _ if a.is_empty() => continue,
                _ => return Err(Error::Config(format!("bad coefficient row: {line}"))),
            }
        }
        if a.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "coefficient file has {} rows, grid has {} nodes",
                a.len(),
                grid.len()
            )));
        }
        let mu = a.iter().cloned().fold(f64::INFINITY, f64::min);
        Self::with_profile(a, c, mu, &path.display().to_string())
    }

    /// Resolve a profile name (`constant`, `variable1`) or CSV path.
    pub fn by_name(name: &str, grid: &SpatialGrid) -> Result<Self> {
        match name {
            "constant" => Ok(Self::constant(grid)),
            "variable1" => Ok(Self::variable1(grid)),
            path => Self::from_csv(Path::new(path), grid),
        }
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn profile(&self) -> &str {
        &self.profile
    }

    fn check_grid(&self, grid: &SpatialGrid) -> Result<()> {
        if self.a.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "coefficients sampled on {} nodes, grid has {}",
                self.a.len(),
                grid.len()
            )));
        }
        Ok(())
    }
}

/// Interior-node matrices of the lumped-mass discretization:
/// stiffness-plus-reaction `K` (symmetric tridiagonal) and diagonal mass.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: SpatialGrid,
    a_half: Vec<f64>,
    c: Vec<f64>,
    pub stiffness_diag: Vec<f64>,
    pub stiffness_off: Vec<f64>,
    pub mass: Vec<f64>,
}

impl DiscreteOperator {
    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    /// `A_h u = M⁻¹ K u` at the interior nodes of a full-grid vector; the
    /// boundary values of `u` enter through the end stencils. Boundary rows
    /// of the output are zero.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.grid.cells();
        let h2 = self.grid.h().powi(2);
        let mut out = vec![0.0; m + 1];
        for j in 1..m {
            let flux_r = self.a_half[j] * (u[j + 1] - u[j]);
            let flux_l = self.a_half[j - 1] * (u[j] - u[j - 1]);
            out[j] = -(flux_r - flux_l) / h2 + self.c[j] * u[j];
        }
        out
    }
}

/// Assemble `K` and the lumped mass on the interior nodes, with the
/// coefficient averaged onto cell midpoints.
pub fn assemble_operator(coeffs: &Coefficients, grid: &SpatialGrid) -> Result<DiscreteOperator> {
    coeffs.check_grid(grid)?;
    let m = grid.cells();
    let h = grid.h();
    let a_half: Vec<f64> = (0..m).map(|j| 0.5 * (coeffs.a[j] + coeffs.a[j + 1])).collect();
    let interior = m - 1;
    let mut diag = Vec::with_capacity(interior);
    let mut off = Vec::with_capacity(interior.saturating_sub(1));
    for j in 1..m {
        diag.push((a_half[j - 1] + a_half[j]) / h + h * coeffs.c[j]);
        if j + 1 < m {
            off.push(-a_half[j] / h);
        }
    }
    Ok(DiscreteOperator {
        grid: *grid,
        a_half,
        c: coeffs.c.clone(),
        stiffness_diag: diag,
        stiffness_off: off,
        mass: vec![h; interior],
    })
}

/// Truncated eigenstructure of the discrete operator.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    grid: SpatialGrid,
    lambda: Vec<f64>,
    phi: Vec<Vec<f64>>,
    flux: Vec<(f64, f64)>,
}

impl EigenBasis {
    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Full-grid node values of mode `k` (zero at both ends).
    pub fn phi(&self, k: usize) -> &[f64] {
        &self.phi[k]
    }

    /// `(∂_{ν_A} φ_k(0), ∂_{ν_A} φ_k(L))`.
    pub fn flux(&self, k: usize) -> (f64, f64) {
        self.flux[k]
    }

    /// Mass-inner-product coefficients `(u, φ_k)` for every retained mode.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.phi.iter().map(|p| self.grid.dot(u, p)).collect()
    }

    /// `Σ_k c_k φ_k` on the full grid.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (c, p) in coeffs.iter().zip(&self.phi) {
            for (o, v) in out.iter_mut().zip(p) {
                *o += c * v;
            }
        }
        out
    }

    /// Keep only the first `k` modes.
    pub fn truncated(&self, k: usize) -> Result<EigenBasis> {
        if k == 0 || k > self.len() {
            return Err(Error::BasisSize(format!("cannot keep {k} of {} modes", self.len())));
        }
        Ok(EigenBasis {
            grid: self.grid,
            lambda: self.lambda[..k].to_vec(),
            phi: self.phi[..k].to_vec(),
            flux: self.flux[..k].to_vec(),
        })
    }
}

/// First `k` eigenpairs of `K φ = λ M φ`, mass-orthonormal, ascending.
/// Eigenvectors are signed so that the first interior value is positive.
pub fn eigendecompose(op: &DiscreteOperator, coeffs: &Coefficients, k: usize) -> Result<EigenBasis> {
    let grid = op.grid;
    let m = grid.cells();
    if k == 0 || k > m / 4 {
        return Err(Error::BasisSize(format!("need 1 <= K <= M/4 = {}, got {k}", m / 4)));
    }
    // lumped mass is h·I, so M^{-1/2} K M^{-1/2} = K / h
    let h = grid.h();
    let diag: Vec<f64> = op.stiffness_diag.iter().zip(&op.mass).map(|(d, w)| d / w).collect();
    let off: Vec<f64> = op.stiffness_off.iter().map(|o| o / h).collect();
    let (values, vectors) = symmetric_tridiagonal_eigen(&diag, &off)?;
    let scale = 1.0 / h.sqrt();
    let mut lambda = Vec::with_capacity(k);
    let mut phi = Vec::with_capacity(k);
    let mut flux = Vec::with_capacity(k);
    for (val, vec) in values.into_iter().zip(vectors).take(k) {
        let sign = if vec[0] < 0.0 { -scale } else { scale };
        let mut full = vec![0.0; m + 1];
        for (dst, src) in full[1..m].iter_mut().zip(&vec) {
            *dst = sign * src;
        }
        flux.push(green_flux(&full, coeffs, &grid)?);
        lambda.push(val);
        phi.push(full);
    }
    Ok(EigenBasis { grid, lambda, phi, flux })
}

/// Boundary flux from the discrete Green formula of the assembled operator:
/// `(-a_{1/2}(u_1 - u_0)/h, a_{M-1/2}(u_M - u_{M-1})/h)`.
///
/// For interior vectors `w` (zero on Γ) it satisfies
/// `(A_h u, w)_h = (u, A_h w)_h + u_0 ∂_ν w(0) + u_M ∂_ν w(L)` exactly, and it
/// is second order for functions vanishing on Γ. Eigenvector and dual fluxes
/// use it so that transposition and lifting agree on the grid.
pub fn green_flux(u: &[f64], coeffs: &Coefficients, grid: &SpatialGrid) -> Result<(f64, f64)> {
    let m = grid.cells();
    if u.len() != grid.len() {
        return Err(Error::GridMismatch(format!("vector has {} values, grid has {} nodes", u.len(), grid.len())));
    }
    coeffs.check_grid(grid)?;
    let h = grid.h();
    let al = 0.5 * (coeffs.a[0] + coeffs.a[1]);
    let ar = 0.5 * (coeffs.a[m - 1] + coeffs.a[m]);
    Ok((-al * (u[1] - u[0]) / h, ar * (u[m] - u[m - 1]) / h))
}

/// `(∂_{ν_A} u(0), ∂_{ν_A} u(L)) = (-a(0) u'(0), a(L) u'(L))` with one-sided
/// three-point derivatives.
pub fn conormal_derivative(u: &[f64], coeffs: &Coefficients, grid: &SpatialGrid) -> Result<(f64, f64)> {
    let m = grid.cells();
    if m < 3 {
        return Err(Error::GridTooCoarse(format!("conormal stencil needs M >= 3, got {m}")));
    }
    if u.len() != grid.len() {
        return Err(Error::GridMismatch(format!("vector has {} values, grid has {} nodes", u.len(), grid.len())));
    }
    coeffs.check_grid(grid)?;
    let inv = 1.0 / (2.0 * grid.h());
    let d0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * inv;
    let dl = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) * inv;
    Ok((-coeffs.a[0] * d0, coeffs.a[m] * dl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_coefficients_give_second_difference() {
        let grid = SpatialGrid::new(1.0, 4).unwrap();
        let op = assemble_operator(&Coefficients::constant(&grid), &grid).unwrap();
        let h = grid.h();
        for (d, w) in op.stiffness_diag.iter().zip(&op.mass) {
            assert!((d / w - 2.0 / (h * h)).abs() < 1e-12);
        }
        for o in &op.stiffness_off {
            assert!((o / h + 1.0 / (h * h)).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipticity_violation_is_reported() {
        let grid = SpatialGrid::new(1.0, 8).unwrap();
        let err = Coefficients::from_fn(&grid, |x| 1.0 - x, |_| 0.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::Ellipticity { .. }));
        assert!(Coefficients::from_fn(&grid, |_| 1.0, |_| -1.0, 0.5).is_err());
    }

    #[test]
    fn shift_and_scale_of_spectrum() {
        let grid = SpatialGrid::new(1.0, 64).unwrap();
        let base = Coefficients::constant(&grid);
        let eig = |c: &Coefficients| {
            let op = assemble_operator(c, &grid).unwrap();
            eigendecompose(&op, c, 16).unwrap().lambda().to_vec()
        };
        let l0 = eig(&base);
        let shifted = eig(&Coefficients::from_fn(&grid, |_| 1.0, |_| 3.0, 1.0).unwrap());
        let scaled = eig(&Coefficients::from_fn(&grid, |_| 4.0, |_| 0.0, 4.0).unwrap());
        for k in 0..16 {
            assert!((shifted[k] - l0[k] - 3.0).abs() < 1e-9 * l0[k]);
            assert!((scaled[k] - 4.0 * l0[k]).abs() < 1e-9 * l0[k]);
        }
    }

    #[test]
    fn basis_size_rule() {
        let grid = SpatialGrid::new(1.0, 32).unwrap();
        let c = Coefficients::constant(&grid);
        let op = assemble_operator(&c, &grid).unwrap();
        assert!(eigendecompose(&op, &c, 9).is_err());
        assert!(eigendecompose(&op, &c, 0).is_err());
        assert!(eigendecompose(&op, &c, 8).is_ok());
    }

    #[test]
    fn conormal_examples() {
        let grid = SpatialGrid::new(PI, 400).unwrap();
        let c = Coefficients::constant(&grid);
        let s: Vec<f64> = grid.nodes().map(f64::sin).collect();
        let (l, r) = conormal_derivative(&s, &c, &grid).unwrap();
        assert!((l + 1.0).abs() < 1e-4 && (r + 1.0).abs() < 1e-4);
        let k: Vec<f64> = vec![2.0; grid.len()];
        assert_eq!(conormal_derivative(&k, &c, &grid).unwrap(), (0.0, 0.0));

        let g2 = SpatialGrid::new(2.0, 10).unwrap();
        let a0 = 3.0;
        let c2 = Coefficients::from_fn(&g2, |_| a0, |_| 0.0, 1.0).unwrap();
        let lin: Vec<f64> = g2.nodes().collect();
        let (l, r) = conormal_derivative(&lin, &c2, &g2).unwrap();
        assert!((l + a0).abs() < 1e-12 && (r - a0).abs() < 1e-12);

        let tiny = SpatialGrid::new(1.0, 2).unwrap();
        assert!(conormal_derivative(&[0.0; 3], &Coefficients::constant(&tiny), &tiny).is_err());
    }

    #[test]
    fn flux_is_the_conormal_of_the_eigenvector() {
        let grid = SpatialGrid::new(1.0, 64).unwrap();
        let c = Coefficients::variable1(&grid);
        let op = assemble_operator(&c, &grid).unwrap();
        let basis = eigendecompose(&op, &c, 16).unwrap();
        for k in 0..16 {
            assert_eq!(green_flux(basis.phi(k), &c, &grid).unwrap(), basis.flux(k));
            let (l, r) = conormal_derivative(basis.phi(k), &c, &grid).unwrap();
            let (fl, fr) = basis.flux(k);
            let tol = ((k + 1) as f64 * PI * grid.h()).powi(2);
            assert!((l - fl).abs() < tol * fl.abs() && (r - fr).abs() < tol * fr.abs(), "k={k}");
            assert!(basis.lambda()[k] > 0.0);
        }
    }
}
