use alloc::format;
use alloc::vec::Vec;

use super::{ellipticity_threshold, CountError, ModeCutPolicy, STABILITY_FACTOR};
use crate::lb_spectrum::{BasisSource, SpectralBasis};
use crate::linalg::{symmetric_eigen, DMat};
use crate::sphharm::axisymmetric_gram;
use crate::surface::{GammaField, GammaRange, Site, Surface, SurfaceName};

/// Extra Gauss nodes on top of the `max_degree + 1` that integrate products
/// of two harmonics exactly; covers smooth non-polynomial `gamma0(mu)`.
const GRAM_EXTRA_NODES: usize = 48;

/// Relative gap below which neighbouring mesh eigenvalues belong to one
/// cluster and are kept or dropped together.
const CLUSTER_GAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Moments {
    Constant(f64),
    /// Gram blocks of `gamma0(mu)` against normalized Legendre functions,
    /// one per order `m = 0..=max_degree`, row-major.
    Axisymmetric { max_degree: usize, blocks: Vec<Vec<f64>> },
    Dense(DMat),
}

/// The matrix `G_ij = <phi_i, gamma0 phi_j>` of a basis, computed once and
/// reused for every `h`.
#[derive(Debug, Clone)]
pub struct GammaMoments<'a> {
    basis: &'a SpectralBasis,
    range: GammaRange,
    moments: Moments,
}

/// Matrix layout of a truncated `Q(h)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    /// Constant damping: entries `sqrt(1 + h^2 lambda_j) - gamma0`.
    Diagonal(Vec<f64>),
    /// Axisymmetric damping on the sphere: one block per order `m`, shared by
    /// the cosine and sine families (`multiplicity` 2 for `m > 0`).
    Blocks(Vec<AxisBlock>),
    Dense(DMat),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisBlock {
    pub order: usize,
    pub multiplicity: usize,
    /// Rows and columns correspond to degrees `order..=order + dim - 1`.
    pub matrix: DMat,
}

/// Truncated model of `Q(h)` in a Laplace-Beltrami eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinOperator {
    pub h: f64,
    pub mode_cut: usize,
    pub structure: Structure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NegativeCount {
    /// Eigenvalues `< -zero_tol`.
    pub negative: usize,
    /// Eigenvalues in `[-zero_tol, zero_tol]`.
    pub borderline: usize,
}

fn sphere_degree_for(threshold: f64) -> usize {
    // smallest L with L (L + 1) >= threshold
    let mut l = libm::floor((-1.0 + libm::sqrt(1.0 + 4.0 * threshold.max(0.0))) / 2.0) as usize;
    while ((l * (l + 1)) as f64) < threshold {
        l += 1;
    }
    while l > 0 && (((l - 1) * l) as f64) >= threshold {
        l -= 1;
    }
    l
}

fn shell_degree_for_modes(modes: usize) -> usize {
    // smallest L with (L + 1)^2 >= modes
    let mut l = 0;
    while (l + 1) * (l + 1) < modes {
        l += 1;
    }
    l
}

impl<'a> GammaMoments<'a> {
    pub fn new(basis: &'a SpectralBasis, field: &GammaField, surface: &Surface) -> Result<Self, CountError> {
        let range = field.range_on(surface)?;
        let moments = match (basis.source(), surface) {
            (BasisSource::ExactSphere { max_degree }, Surface::Analytic(s)) => {
                if s.name() != SurfaceName::UnitSphere {
                    return Err(CountError::Invalid("the exact spectral basis requires the unit sphere".into()));
                }
                if field.is_constant() {
                    Moments::Constant(field.gamma0(&Site::Point([0.0, 0.0, 1.0]))?)
                } else {
                    if field.symmetry_axis().is_none() {
                        return Err(CountError::Invalid("the exact sphere basis needs an axisymmetric damping".into()));
                    }
                    // validated above, so every mu in [-1, 1] is admissible
                    field.gamma0_along_axis(0.0)?;
                    let blocks =
                        axisymmetric_gram(max_degree, GRAM_EXTRA_NODES, |mu| field.gamma0_along_axis(mu).unwrap_or(f64::NAN));
                    Moments::Axisymmetric { max_degree, blocks }
                }
            }
            (BasisSource::MeshFem { .. }, Surface::Mesh(mesh)) => {
                if field.is_constant() {
                    Moments::Constant(field.gamma0(&Site::Vertex(0, mesh.vertices()[0]))?)
                } else {
                    let (vectors, mass) = match (basis.eigenvectors(), basis.mass()) {
                        (Some(v), Some(m)) => (v, m),
                        _ => return Err(CountError::Invalid("variable damping on a mesh needs eigenvectors".into())),
                    };
                    if vectors.nrows() != mesh.vertices().len() {
                        return Err(CountError::Invalid(format!(
                            "basis has {} rows for a mesh of {} vertices",
                            vectors.nrows(),
                            mesh.vertices().len()
                        )));
                    }
                    let sqrt_g: Vec<f64> = mesh
                        .vertices()
                        .iter()
                        .enumerate()
                        .map(|(i, p)| field.gamma0(&Site::Vertex(i, *p)).map(libm::sqrt))
                        .collect::<Result<_, _>>()?;
                    let weighted = mass.scaled_symmetric(&sqrt_g);
                    let k = vectors.ncols();
                    let mut w = DMat::zeros(vectors.nrows(), k);
                    for j in 0..k {
                        weighted.mul_vec_into(vectors.column(j), w.column_mut(j));
                    }
                    let g = DMat::from_fn(k, k, |i, j| {
                        let (a, b) = (vectors.column(i), w.column(j));
                        a.iter().zip(b).map(|(x, y)| x * y).sum()
                    });
                    Moments::Dense(DMat::from_fn(k, k, |i, j| 0.5 * (g[(i, j)] + g[(j, i)])))
                }
            }
            (BasisSource::ExactSphere { .. }, Surface::Mesh(_)) => {
                return Err(CountError::Invalid("the exact sphere basis cannot be used with a mesh surface".into()))
            }
            (BasisSource::MeshFem { .. }, Surface::Analytic(_)) => {
                return Err(CountError::Invalid("a mesh spectral basis needs the mesh surface".into()))
            }
        };
        Ok(Self { basis, range, moments })
    }

    pub fn basis(&self) -> &SpectralBasis {
        self.basis
    }

    pub fn range(&self) -> &GammaRange {
        &self.range
    }

    fn is_exact(&self) -> bool {
        matches!(self.basis.source(), BasisSource::ExactSphere { .. })
    }

    fn max_degree(&self) -> usize {
        match self.basis.source() {
            BasisSource::ExactSphere { max_degree } => max_degree,
            BasisSource::MeshFem { .. } => 0,
        }
    }

    fn complete_cluster(&self, mut cut: usize) -> usize {
        let ev = self.basis.eigenvalues();
        while cut > 0 && cut < ev.len() && ev[cut] - ev[cut - 1] <= CLUSTER_GAP * (1.0 + ev[cut].abs()) {
            cut += 1;
        }
        cut
    }

    fn insufficient(&self, lambda_needed: f64, required_modes: usize) -> CountError {
        CountError::InsufficientSpectrum {
            required_modes,
            available: self.basis.mode_count(),
            lambda_needed,
            top: self.basis.top_eigenvalue(),
        }
    }

    /// Number of retained modes at `h` under `policy`.
    pub fn mode_cut(&self, h: f64, policy: ModeCutPolicy) -> Result<usize, CountError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CountError::Invalid(format!("h = {h} must be positive")));
        }
        match policy {
            ModeCutPolicy::ThresholdMultiple { factor } => {
                if !(factor >= 1.0 && factor.is_finite()) {
                    return Err(CountError::Invalid(format!("mode-cut factor {factor} must be at least 1")));
                }
                let target = factor * ellipticity_threshold(self.range.c1, h);
                if self.is_exact() {
                    let l = sphere_degree_for(target);
                    if l > self.max_degree() {
                        return Err(self.insufficient(target, (l + 1) * (l + 1)));
                    }
                    Ok((l + 1) * (l + 1))
                } else {
                    let ev = self.basis.eigenvalues();
                    match ev.iter().position(|&l| l >= target) {
                        Some(i) => Ok(self.complete_cluster(i + 1)),
                        None => {
                            let area = self.basis.mass().map_or(4.0 * core::f64::consts::PI, |m| m.row_sums().iter().sum());
                            let weyl = libm::ceil(area * target / (4.0 * core::f64::consts::PI)) as usize;
                            Err(self.insufficient(target, weyl + 1))
                        }
                    }
                }
            }
            ModeCutPolicy::Fixed { modes } => {
                if modes == 0 {
                    return Err(CountError::Invalid("fixed mode cut must be positive".into()));
                }
                if self.is_exact() {
                    let l = shell_degree_for_modes(modes);
                    if l > self.max_degree() {
                        return Err(self.insufficient(f64::NAN, (l + 1) * (l + 1)));
                    }
                    Ok((l + 1) * (l + 1))
                } else if modes > self.basis.mode_count() {
                    Err(self.insufficient(f64::NAN, modes))
                } else {
                    Ok(self.complete_cluster(modes))
                }
            }
        }
    }

    /// Mode cut for the truncation-stability recount, and whether the basis
    /// had room for the full enlargement.
    pub fn stability_cut(&self, mode_cut: usize) -> (usize, bool) {
        let target = libm::ceil(STABILITY_FACTOR * mode_cut as f64) as usize;
        if self.is_exact() {
            let l = shell_degree_for_modes(target);
            let lmax = self.max_degree();
            if l <= lmax {
                ((l + 1) * (l + 1), true)
            } else {
                ((lmax + 1) * (lmax + 1), false)
            }
        } else {
            let n = self.basis.mode_count();
            if target <= n {
                (self.complete_cluster(target), true)
            } else {
                (n, false)
            }
        }
    }

    /// `G` restricted to the lowest `mode_cut` modes, in basis order.
    pub fn matrix(&self, mode_cut: usize) -> DMat {
        match &self.moments {
            Moments::Constant(g) => DMat::from_fn(mode_cut, mode_cut, |i, j| if i == j { *g } else { 0.0 }),
            Moments::Dense(g) => DMat::from_fn(mode_cut, mode_cut, |i, j| g[(i, j)]),
            Moments::Axisymmetric { max_degree, blocks } => {
                let labels: Vec<_> = (0..mode_cut).map(crate::sphharm::label_of).collect();
                DMat::from_fn(mode_cut, mode_cut, |i, j| {
                    let (a, b) = (labels[i], labels[j]);
                    if a.order != b.order || a.sine != b.sine {
                        return 0.0;
                    }
                    let m = a.order;
                    let size = max_degree - m + 1;
                    blocks[m][(a.degree - m) * size + (b.degree - m)]
                })
            }
        }
    }

    /// Galerkin operator at `h` with an explicit mode count.
    pub fn operator_with_cut(&self, h: f64, mode_cut: usize) -> Result<GalerkinOperator, CountError> {
        if mode_cut == 0 || mode_cut > self.basis.mode_count() {
            return Err(CountError::Invalid(format!(
                "mode cut {mode_cut} outside 1..={}",
                self.basis.mode_count()
            )));
        }
        let ev = self.basis.eigenvalues();
        let d = |j: usize| libm::sqrt(1.0 + h * h * ev[j]);
        let structure = match &self.moments {
            Moments::Constant(g) => Structure::Diagonal((0..mode_cut).map(|j| d(j) - g).collect()),
            Moments::Dense(g) => {
                Structure::Dense(DMat::from_fn(mode_cut, mode_cut, |i, j| if i == j { d(i) } else { 0.0 } - g[(i, j)]))
            }
            Moments::Axisymmetric { max_degree, blocks } => {
                let l = shell_degree_for_modes(mode_cut);
                if (l + 1) * (l + 1) != mode_cut {
                    return Err(CountError::Invalid(format!("mode cut {mode_cut} is not a complete degree shell")));
                }
                let out = (0..=l)
                    .map(|m| {
                        let size = l - m + 1;
                        let stride = max_degree - m + 1;
                        let matrix = DMat::from_fn(size, size, |i, j| {
                            let deg = (m + i) as f64;
                            let diag = if i == j { libm::sqrt(1.0 + h * h * deg * (deg + 1.0)) } else { 0.0 };
                            diag - blocks[m][i * stride + j]
                        });
                        AxisBlock { order: m, multiplicity: if m == 0 { 1 } else { 2 }, matrix }
                    })
                    .collect();
                Structure::Blocks(out)
            }
        };
        Ok(GalerkinOperator { h, mode_cut, structure })
    }

    pub fn operator(&self, h: f64, policy: ModeCutPolicy) -> Result<GalerkinOperator, CountError> {
        let cut = self.mode_cut(h, policy)?;
        self.operator_with_cut(h, cut)
    }
}

/// Galerkin model of `Q(h)` on `basis` for the damping `field`.
pub fn build_q(
    basis: &SpectralBasis,
    field: &GammaField,
    surface: &Surface,
    h: f64,
    policy: ModeCutPolicy,
) -> Result<GalerkinOperator, CountError> {
    GammaMoments::new(basis, field, surface)?.operator(h, policy)
}

impl GalerkinOperator {
    /// Dense `mode_cut x mode_cut` matrix in basis order.
    pub fn matrix(&self) -> DMat {
        match &self.structure {
            Structure::Diagonal(d) => DMat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 }),
            Structure::Dense(a) => a.clone(),
            Structure::Blocks(blocks) => {
                let labels: Vec<_> = (0..self.mode_cut).map(crate::sphharm::label_of).collect();
                DMat::from_fn(self.mode_cut, self.mode_cut, |i, j| {
                    let (a, b) = (labels[i], labels[j]);
                    if a.order != b.order || a.sine != b.sine {
                        return 0.0;
                    }
                    blocks[a.order].matrix[(a.degree - a.order, b.degree - a.order)]
                })
            }
        }
    }

    /// All eigenvalues, ascending, with multiplicity.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, CountError> {
        let mut out = match &self.structure {
            Structure::Diagonal(d) => d.clone(),
            Structure::Dense(a) => symmetric_eigen(a)?.values,
            Structure::Blocks(blocks) => {
                let mut all = Vec::with_capacity(self.mode_cut);
                for b in blocks {
                    let values = symmetric_eigen(&b.matrix)?.values;
                    for _ in 0..b.multiplicity {
                        all.extend_from_slice(&values);
                    }
                }
                all
            }
        };
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

/// Counts eigenvalues below `-zero_tol`; those within `zero_tol` of zero are
/// reported separately.
pub fn count_negative(op: &GalerkinOperator, zero_tol: f64) -> Result<NegativeCount, CountError> {
    let mut c = NegativeCount::default();
    for mu in op.eigenvalues()? {
        if mu < -zero_tol {
            c.negative += 1;
        } else if mu <= zero_tol {
            c.borderline += 1;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::ZERO_TOL;
    use crate::lb_spectrum::{assemble_fem, exact_sphere_spectrum, solve_lowest, MassScheme};
    use crate::sphharm::mu_coupling;
    use crate::surface::{icosphere, AnalyticSurface};
    use proptest::prelude::*;

    fn sphere() -> Surface {
        Surface::Analytic(AnalyticSurface::unit_sphere())
    }

    fn affine() -> GammaField {
        GammaField::affine(2.0, 0.5, [0.0, 0.0, 1.0]).unwrap()
    }

    /// `sum (2n + 1)` over `n (n + 1) < r^2 (g^2 - 1)`
    fn sphere_oracle(r: f64, g: f64) -> usize {
        let bound = r * r * (g * g - 1.0);
        (0..).take_while(|&n| ((n * (n + 1)) as f64) < bound).map(|n| 2 * n + 1).sum()
    }

    #[test]
    fn constant_damping_diagonal_example() {
        let basis = exact_sphere_spectrum(2);
        let field = GammaField::constant(2.0).unwrap();
        let m = GammaMoments::new(&basis, &field, &sphere()).unwrap();
        let op = m.operator_with_cut(1.0, 4).unwrap();
        let Structure::Diagonal(d) = &op.structure else { panic!("expected a diagonal operator") };
        assert_eq!(d[0], -1.0);
        for &v in &d[1..] {
            assert!((v - (libm::sqrt(3.0) - 2.0)).abs() < 1e-15);
        }
        let a = op.matrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(a[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn sphere_counts_match_enumeration() {
        let basis = exact_sphere_spectrum(80);
        let field = GammaField::constant(2.0).unwrap();
        let m = GammaMoments::new(&basis, &field, &sphere()).unwrap();
        for (r, want) in [(5.0, 81), (10.0, 289), (20.0, 1225)] {
            let op = m.operator(1.0 / r, ModeCutPolicy::default()).unwrap();
            let c = count_negative(&op, ZERO_TOL).unwrap();
            assert_eq!(c.negative, want);
            assert_eq!(c.negative, sphere_oracle(r, 2.0));
            assert_eq!(c.borderline, 0);
        }
    }

    #[test]
    fn exact_crossing_is_borderline() {
        // n = 48: n (n + 1) = 2352 = 3 * 28^2
        let basis = exact_sphere_spectrum(80);
        let field = GammaField::constant(2.0).unwrap();
        let op = build_q(&basis, &field, &sphere(), 1.0 / 28.0, ModeCutPolicy::default()).unwrap();
        let c = count_negative(&op, ZERO_TOL).unwrap();
        assert_eq!(c.borderline, 97);
        assert_eq!(c.negative, 48 * 48);
    }

    #[test]
    fn mean_damping_is_the_constant_mode_entry() {
        let basis = exact_sphere_spectrum(6);
        let field = affine();
        let m = GammaMoments::new(&basis, &field, &sphere()).unwrap();
        let g = m.matrix(49);
        let s = AnalyticSurface::unit_sphere();
        let oracle = s.integrate(|p| 2.0 + 0.5 * p[2]) / (4.0 * core::f64::consts::PI);
        assert!((g[(0, 0)] - 2.0).abs() < 1e-13);
        assert!((g[(0, 0)] - oracle).abs() < 1e-9);
        assert!(g.asymmetry() < 1e-12);
    }

    #[test]
    fn affine_moments_match_closed_form_recurrence() {
        // gamma0 = a + b mu couples degree l only to l +- 1
        let lmax = 12;
        let basis = exact_sphere_spectrum(lmax);
        let field = affine();
        let m = GammaMoments::new(&basis, &field, &sphere()).unwrap();
        let g = m.matrix((lmax + 1) * (lmax + 1));
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let (a, b) = (crate::sphharm::label_of(i), crate::sphharm::label_of(j));
                let want = if a.order != b.order || a.sine != b.sine {
                    0.0
                } else if a.degree == b.degree {
                    2.0
                } else if b.degree == a.degree + 1 {
                    0.5 * mu_coupling(a.degree, a.order)
                } else if a.degree == b.degree + 1 {
                    0.5 * mu_coupling(b.degree, b.order)
                } else {
                    0.0
                };
                assert!((g[(i, j)] - want).abs() < 1e-13, "({i}, {j}): {} vs {want}", g[(i, j)]);
            }
        }
    }

    #[test]
    fn block_operator_matches_dense_assembly() {
        let basis = exact_sphere_spectrum(9);
        let field = affine();
        let m = GammaMoments::new(&basis, &field, &sphere()).unwrap();
        let op = m.operator_with_cut(0.3, 100).unwrap();
        let dense = op.matrix();
        let g = m.matrix(100);
        for i in 0..100 {
            let lam = basis.eigenvalues()[i];
            for j in 0..100 {
                let d = if i == j { libm::sqrt(1.0 + 0.09 * lam) } else { 0.0 };
                assert!((dense[(i, j)] - (d - g[(i, j)])).abs() < 1e-14);
            }
        }
        let mut want = symmetric_eigen(&dense).unwrap().values;
        want.sort_by(f64::total_cmp);
        let got = op.eigenvalues().unwrap();
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reciprocal_field_gives_identical_operator() {
        let basis = exact_sphere_spectrum(40);
        let field = affine();
        let below = field.reciprocal();
        let a = build_q(&basis, &field, &sphere(), 0.1, ModeCutPolicy::default()).unwrap();
        let b = build_q(&basis, &below, &sphere(), 0.1, ModeCutPolicy::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn insufficient_basis_names_required_modes() {
        let basis = exact_sphere_spectrum(10);
        let field = GammaField::constant(2.0).unwrap();
        match build_q(&basis, &field, &sphere(), 0.1, ModeCutPolicy::default()) {
            Err(CountError::InsufficientSpectrum { required_modes, available, .. }) => {
                // 2 lambda* = 600 -> L = 24
                assert_eq!(required_modes, 625);
                assert_eq!(available, 121);
            }
            other => panic!("expected insufficient spectrum, got {other:?}"),
        }
    }

    #[test]
    fn mode_cut_reaches_twice_the_threshold() {
        let basis = exact_sphere_spectrum(70);
        let field = affine();
        let m = GammaMoments::new(&basis, &field, &sphere()).unwrap();
        let h = 1.0 / 16.0;
        let cut = m.mode_cut(h, ModeCutPolicy::default()).unwrap();
        let target = 2.0 * (2.5f64 * 2.5 - 1.0) / (h * h);
        assert!(basis.eigenvalues()[cut - 1] >= target);
        assert!(basis.eigenvalues()[cut - 1 - (2 * shell_degree_for_modes(cut) + 1)] < target);
        let (stable, room) = m.stability_cut(cut);
        assert!(room && stable as f64 >= 1.5 * cut as f64);
    }

    #[test]
    fn variable_spectrum_obeys_ellipticity_bounds() {
        let basis = exact_sphere_spectrum(40);
        let field = affine();
        let op = build_q(&basis, &field, &sphere(), 0.1, ModeCutPolicy::default()).unwrap();
        let ev = op.eigenvalues().unwrap();
        let top = libm::sqrt(1.0 + 0.01 * basis.eigenvalues()[op.mode_cut - 1]);
        assert!(ev[0] >= 1.0 - 2.5 - 1e-12);
        assert!(*ev.last().unwrap() <= top - 1.5 + 1e-12);
    }

    #[test]
    fn mesh_moments_for_constant_and_affine_damping() {
        let mesh = icosphere(2);
        let pencil = assemble_fem(&mesh, MassScheme::Mixed).unwrap();
        let basis = solve_lowest(&pencil, 25, 1e-9).unwrap();
        let surface = Surface::Mesh(mesh);
        let constant = GammaField::constant(3.0).unwrap();
        let m = GammaMoments::new(&basis, &constant, &surface).unwrap();
        assert_eq!(m.matrix(25), DMat::from_fn(25, 25, |i, j| if i == j { 3.0 } else { 0.0 }));
        let m = GammaMoments::new(&basis, &affine(), &surface).unwrap();
        let g = m.matrix(25);
        assert!(g.asymmetry() < 1e-14);
        assert!((g[(0, 0)] - 2.0).abs() < 1e-3);
        // eigenvalues of a compression of multiplication by gamma0 lie in its range
        let ev = symmetric_eigen(&g).unwrap().values;
        assert!(ev[0] > 1.5 - 1e-8 && ev[24] < 2.5 + 1e-8);
    }

    #[test]
    fn mismatched_basis_and_surface_are_rejected() {
        let basis = exact_sphere_spectrum(3);
        let field = GammaField::constant(2.0).unwrap();
        let mesh = Surface::Mesh(icosphere(1));
        assert!(matches!(GammaMoments::new(&basis, &field, &mesh), Err(CountError::Invalid(_))));
        let ell = Surface::Analytic(AnalyticSurface::ellipsoid(2.0, 1.0, 1.0).unwrap());
        assert!(matches!(GammaMoments::new(&basis, &field, &ell), Err(CountError::Invalid(_))));
    }

    proptest! {
        #[test]
        fn constant_counts_match_enumeration(g in 1.1f64..4.0, r in 1.0f64..12.0) {
            let basis = exact_sphere_spectrum(100);
            let field = GammaField::constant(g).unwrap();
            let op = build_q(&basis, &field, &sphere(), 1.0 / r, ModeCutPolicy::default()).unwrap();
            let c = count_negative(&op, ZERO_TOL).unwrap();
            prop_assume!(c.borderline == 0);
            prop_assert_eq!(c.negative, sphere_oracle(r, g));
            let bound = r * r * (g * g - 1.0);
            prop_assert!((c.negative as f64 - bound).abs() <= 3.0 * r * libm::sqrt(g * g - 1.0) + 1.0);
        }

        #[test]
        fn below_one_constant_matches_reciprocal(g in 1.1f64..4.0, r in 1.0f64..10.0) {
            let basis = exact_sphere_spectrum(80);
            let above = GammaField::constant(g).unwrap();
            let a = build_q(&basis, &above, &sphere(), 1.0 / r, ModeCutPolicy::default()).unwrap();
            let b = build_q(&basis, &above.reciprocal(), &sphere(), 1.0 / r, ModeCutPolicy::default()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
