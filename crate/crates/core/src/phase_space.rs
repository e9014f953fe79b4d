//! Phase-space sampling lattices and sampled phase-space functions.
//!
//! A [`Lattice`] is a centred rectangular sampling `x_i = (i - nx/2) * sx`,
//! `p_k = (k - np/2) * sp` whose steps are integer multiples of `dx/2` and
//! `dp/2` of the underlying [`SpatialGrid`]. Keeping the steps integral makes
//! every kernel phase `p x / hbar` a multiple of `pi / (2N)`, which is looked
//! up in an exact table.
//!
//! Three lattices are used:
//!
//! * [`Lattice::wigner`]: `N x N`, x step `dx`, p step `dp/2`. Cross-Wigner
//!   quadrature with lag step `2 dx` resolves exactly the momentum band
//!   `[-pi hbar/(2 dx), pi hbar/(2 dx))`, which is what this lattice covers.
//! * [`Lattice::fine`]: `2N x 2N`, x step `dx/2`, p step `dp/2` over the full
//!   band. Needed to rebuild operator kernels between grid points of either
//!   parity.
//! * the symplectic duals of the above ([`Lattice::dual`]), on which
//!   ambiguity functions live.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    grid: SpatialGrid,
    nx: usize,
    /// x step in units of dx/2
    x_unit: i64,
    np: usize,
    /// p step in units of dp/2
    p_unit: i64,
}

impl Lattice {
    pub fn wigner(grid: &SpatialGrid) -> Self {
        let n = grid.num_points();
        Self { grid: *grid, nx: n, x_unit: 2, np: n, p_unit: 1 }
    }

    pub fn fine(grid: &SpatialGrid) -> Self {
        let n = grid.num_points();
        Self { grid: *grid, nx: 2 * n, x_unit: 1, np: 2 * n, p_unit: 1 }
    }

    /// Lattice reached by the symplectic Fourier transform.
    pub fn dual(&self) -> Self {
        let four_n = 4 * self.grid.num_points() as i64;
        let x_unit = four_n / (self.np as i64 * self.p_unit);
        let p_unit = four_n / (self.nx as i64 * self.x_unit);
        debug_assert_eq!(x_unit * self.np as i64 * self.p_unit, four_n);
        debug_assert_eq!(p_unit * self.nx as i64 * self.x_unit, four_n);
        Self { grid: self.grid, nx: self.np, x_unit, np: self.nx, p_unit }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_step(&self) -> f64 {
        self.x_unit as f64 * self.grid.dx() / 2.0
    }

    pub fn p_step(&self) -> f64 {
        self.p_unit as f64 * self.grid.dp() / 2.0
    }

    pub fn cell_area(&self) -> f64 {
        self.x_step() * self.p_step()
    }

    /// Position of column `i` in units of `dx/2`.
    #[inline]
    pub fn x_half(&self, i: usize) -> i64 {
        (i as i64 - (self.nx / 2) as i64) * self.x_unit
    }

    /// Momentum of row `k` in units of `dp/2`.
    #[inline]
    pub fn p_half(&self, k: usize) -> i64 {
        (k as i64 - (self.np / 2) as i64) * self.p_unit
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_half(i) as f64 * self.grid.dx() / 2.0
    }

    pub fn p(&self, k: usize) -> f64 {
        self.p_half(k) as f64 * self.grid.dp() / 2.0
    }

    /// Index of the lattice point whose position equals grid point `j`.
    pub fn column_of_grid_index(&self, j: usize) -> Option<usize> {
        let h = 2 * j as i64 - self.grid.num_points() as i64;
        if h % self.x_unit != 0 {
            return None;
        }
        let i = h / self.x_unit + (self.nx / 2) as i64;
        (0..self.nx as i64).contains(&i).then_some(i as usize)
    }

    pub(crate) fn check_same(&self, other: &Lattice) -> Result<()> {
        if self.grid.same_as(&other.grid)
            && self.nx == other.nx
            && self.np == other.np
            && self.x_unit == other.x_unit
            && self.p_unit == other.p_unit
        {
            Ok(())
        } else {
            Err(Error::LatticeMismatch(format!("{} vs {}", self.describe(), other.describe())))
        }
    }

    pub fn describe(&self) -> String {
        format!("{}x{} lattice (x step {} dx/2, p step {} dp/2)", self.nx, self.np, self.x_unit, self.p_unit)
    }
}

/// What a [`PhaseSpaceFunction`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Wigner,
    CrossWigner,
    Ambiguity,
    Symbol,
    Rho,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Wigner => "wigner",
            Kind::CrossWigner => "cross_wigner",
            Kind::Ambiguity => "ambiguity",
            Kind::Symbol => "symbol",
            Kind::Rho => "rho",
        }
    }
}

/// Complex samples `F(x_i, p_k)` stored row-major by position:
/// `values[i * np + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceFunction {
    lattice: Lattice,
    kind: Kind,
    values: Vec<Complex64>,
}

impl PhaseSpaceFunction {
    pub fn new(lattice: Lattice, kind: Kind, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::LatticeMismatch(format!("{} values for {}", values.len(), lattice.describe())));
        }
        Ok(Self { lattice, kind, values })
    }

    /// Samples `f(x, p)` at every lattice point.
    pub fn sample(lattice: Lattice, kind: Kind, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(lattice.len());
        for i in 0..lattice.nx() {
            let x = lattice.x(i);
            for k in 0..lattice.np() {
                values.push(f(x, lattice.p(k)));
            }
        }
        Self { lattice, kind, values }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.lattice.grid
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn with_kind(mut self, kind: Kind) -> Self {
        self.kind = kind;
        self
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.values[i * self.lattice.np + k]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let np = self.lattice.np;
        &self.values[i * np..(i + 1) * np]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { lattice: self.lattice, kind: self.kind, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// Pointwise combination of two functions on the same lattice.
    pub fn zip_with(&self, other: &PhaseSpaceFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.lattice.check_same(&other.lattice)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { lattice: self.lattice, kind: self.kind, values })
    }

    /// `sum F dx dp` over the lattice, compensated, row-major order.
    pub fn integral(&self) -> Complex64 {
        let acc: CompensatedSum = self.values.iter().copied().collect();
        acc.value() * self.lattice.cell_area()
    }

    /// `sum a F dx dp` for a second function on the same lattice.
    pub fn integral_against(&self, a: &PhaseSpaceFunction) -> Result<Complex64> {
        self.lattice.check_same(&a.lattice)?;
        let acc: CompensatedSum = self.values.iter().zip(&a.values).map(|(f, s)| f * s).collect();
        Ok(acc.value() * self.lattice.cell_area())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_re(&self) -> f64 {
        self.values.iter().map(|v| v.re.abs()).fold(0.0, f64::max)
    }

    pub fn sup_distance(&self, other: &PhaseSpaceFunction) -> Result<f64> {
        self.lattice.check_same(&other.lattice)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest magnitude on the outermost rows and columns.
    pub fn boundary_max_abs(&self) -> f64 {
        let (nx, np) = (self.lattice.nx, self.lattice.np);
        let mut m: f64 = 0.0;
        for i in 0..nx {
            m = m.max(self.get(i, 0).norm()).max(self.get(i, np - 1).norm());
        }
        for k in 0..np {
            m = m.max(self.get(0, k).norm()).max(self.get(nx - 1, k).norm());
        }
        m
    }

    /// Writes `x,p,re,im` rows, position-major, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,p,re,im")?;
        for i in 0..self.lattice.nx {
            let x = self.lattice.x(i);
            for k in 0..self.lattice.np {
                let v = self.get(i, k);
                writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", x, self.lattice.p(k), v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

/// gnuplot script drawing heatmaps of Re, Im and |F| from the CSV written by
/// [`PhaseSpaceFunction::write_csv`].
pub fn gnuplot_heatmap_script(csv_file: &str, title: &str, lattice: &Lattice) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# heatmaps of {title}");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set view map");
    let _ = writeln!(s, "set size ratio -1");
    let _ = writeln!(s, "set xlabel 'x'");
    let _ = writeln!(s, "set ylabel 'p'");
    let _ = writeln!(s, "set palette defined (-1 'blue', 0 'white', 1 'red')");
    let _ = writeln!(s, "set xrange [{:.6}:{:.6}]", lattice.x(0), lattice.x(lattice.nx() - 1));
    let _ = writeln!(s, "set yrange [{:.6}:{:.6}]", lattice.p(0), lattice.p(lattice.np() - 1));
    let _ = writeln!(s, "set terminal pngcairo size 1500,500");
    let _ = writeln!(s, "set output '{}.png'", csv_file.trim_end_matches(".csv"));
    let _ = writeln!(s, "set multiplot layout 1,3 title '{title}'");
    for (label, expr) in [("Re", "3"), ("Im", "4"), ("abs", "(sqrt($3**2+$4**2))")] {
        let col = if expr.len() == 1 { format!("${expr}") } else { expr.to_string() };
        let _ = writeln!(s, "set title '{label}'");
        let _ = writeln!(s, "splot '{csv_file}' every ::1 using 1:2:({col}) with image notitle");
    }
    let _ = writeln!(s, "unset multiplot");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wigner_lattice_geometry() {
        let g = SpatialGrid::reference();
        let l = Lattice::wigner(&g);
        assert_eq!(l.x(0), g.x(0));
        assert_eq!(l.x(128), 0.0);
        assert!((l.p_step() - g.dp() / 2.0).abs() < 1e-15);
        assert_eq!(l.column_of_grid_index(37), Some(37));
        let d = l.dual();
        assert!((d.x_step() - 2.0 * g.dx()).abs() < 1e-15);
        assert!((d.p_step() - g.dp()).abs() < 1e-15);
        assert_eq!(d.dual(), l);
    }

    #[test]
    fn fine_lattice_geometry() {
        let g = SpatialGrid::reference();
        let l = Lattice::fine(&g);
        assert_eq!(l.nx(), 512);
        assert_eq!(l.x(0), g.x(0));
        assert_eq!(l.column_of_grid_index(37), Some(74));
        let d = l.dual();
        assert!((d.x_step() - g.dx()).abs() < 1e-15);
        assert!((d.p_step() - g.dp()).abs() < 1e-15);
        assert_eq!(d.dual(), l);
    }

    #[test]
    fn integral_of_constant_is_area() {
        let g = SpatialGrid::new(16, 4.0, 1.0).unwrap();
        let l = Lattice::wigner(&g);
        let f = PhaseSpaceFunction::sample(l, Kind::Symbol, |_, _| Complex64::new(1.0, 0.0));
        let area = l.nx() as f64 * l.x_step() * l.np() as f64 * l.p_step();
        assert!((f.integral().re - area).abs() < 1e-12);
    }

    #[test]
    fn mismatched_lattices_are_rejected() {
        let g = SpatialGrid::new(16, 4.0, 1.0).unwrap();
        let a = PhaseSpaceFunction::sample(Lattice::wigner(&g), Kind::Symbol, |x, _| Complex64::new(x, 0.0));
        let b = PhaseSpaceFunction::sample(Lattice::fine(&g), Kind::Symbol, |x, _| Complex64::new(x, 0.0));
        assert!(matches!(a.integral_against(&b), Err(Error::LatticeMismatch(_))));
    }

    #[test]
    fn csv_layout() {
        let g = SpatialGrid::new(8, 8.0, 1.0).unwrap();
        let f = PhaseSpaceFunction::sample(Lattice::wigner(&g), Kind::Symbol, |x, p| Complex64::new(x, p));
        let text = f.to_csv_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,p,re,im");
        assert_eq!(lines.len(), 1 + 64);
        let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first[0], -4.0);
        assert_eq!(first[2], -4.0);
        assert_eq!(first[1], first[3]);
        let script = gnuplot_heatmap_script("w.csv", "W", f.lattice());
        assert!(script.contains("splot 'w.csv'"));
    }
}
