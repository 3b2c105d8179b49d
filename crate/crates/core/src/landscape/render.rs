use std::io::{Cursor, Write};
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat, Rgb, RgbImage};
use imageproc::drawing::{draw_cross_mut, draw_hollow_circle_mut, draw_hollow_rect_mut, draw_line_segment_mut};
use imageproc::rect::Rect;
use rayon::prelude::*;

use super::field::PlotField;
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::point::Bounds;
use crate::problems::ScalarProblem;
use crate::trace::SearchTrace;

/// Distinct path colors, one per start in the default six-start setup.
pub const TRACE_PALETTE: [[u8; 3]; 6] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightScale {
    Linear,
    /// `ln(1 + v)` before normalizing.
    Log,
}

impl HeightScale {
    fn apply(self, v: f64) -> f64 {
        match self {
            HeightScale::Linear => v,
            HeightScale::Log => v.ln_1p(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    pub pixels_per_cell: u32,
    pub height_scale: HeightScale,
    /// Gray level of the lowest and highest value.
    pub gray_low: u8,
    pub gray_high: u8,
    /// Colors of count 0 and of the largest dominance count.
    pub nondominated: [u8; 3],
    pub most_dominated: [u8; 3],
    pub marker_color: [u8; 3],
    pub marker_radius: i32,
    /// Side length of objective-space plots.
    pub plot_size: u32,
    pub background: [u8; 3],
    pub path_color: [u8; 3],
    pub line_color: [u8; 3],
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            pixels_per_cell: 4,
            height_scale: HeightScale::Log,
            gray_low: 40,
            gray_high: 240,
            nondominated: [0, 0, 139],
            most_dominated: [139, 0, 0],
            marker_color: [255, 255, 255],
            marker_radius: 6,
            plot_size: 400,
            background: [255, 255, 255],
            path_color: [230, 25, 75],
            line_color: [0, 0, 0],
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<()> {
        if self.pixels_per_cell == 0 || self.plot_size < 16 || self.marker_radius < 1 {
            return Err(Error::invalid("render sizes must be positive"));
        }
        Ok(())
    }

    fn gray(&self, t: f64) -> Rgb<u8> {
        let (lo, hi) = (f64::from(self.gray_low), f64::from(self.gray_high));
        let g = (lo + (hi - lo) * t.clamp(0.0, 1.0)).round() as u8;
        Rgb([g, g, g])
    }

    fn dominance_color(&self, t: f64) -> Rgb<u8> {
        let t = t.clamp(0.0, 1.0);
        let mut c = [0u8; 3];
        for k in 0..3 {
            let (a, b) = (f64::from(self.nondominated[k]), f64::from(self.most_dominated[k]));
            c[k] = (a + (b - a) * t).round() as u8;
        }
        Rgb(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glyph {
    Cross,
    Circle,
    Square,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub at: [f64; 2],
    pub glyph: Glyph,
    pub color: Option<[u8; 3]>,
}

impl Marker {
    pub fn new(at: [f64; 2], glyph: Glyph) -> Self {
        Marker { at, glyph, color: None }
    }
}

/// A path drawn in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub points: Vec<[f64; 2]>,
    pub color: [u8; 3],
}

impl Overlay {
    /// Decision-space path of a two-dimensional trace.
    pub fn from_trace(trace: &SearchTrace<f64>, color: [u8; 3]) -> Result<Self> {
        let mut points = Vec::with_capacity(trace.len());
        for e in trace.entries() {
            if e.point.dim() != 2 {
                return Err(Error::invalid("only two-dimensional traces can be drawn"));
            }
            points.push([e.point[0], e.point[1]]);
        }
        Ok(Overlay { points, color })
    }
}

/// Affine map from a world rectangle to pixel coordinates, y pointing up in
/// world space and down in the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub width: u32,
    pub height: u32,
}

impl Viewport {
    pub fn to_pixel(&self, p: [f64; 2]) -> (f32, f32) {
        let fx = (p[0] - self.x_range[0]) / (self.x_range[1] - self.x_range[0]);
        let fy = (p[1] - self.y_range[0]) / (self.y_range[1] - self.y_range[0]);
        ((fx * f64::from(self.width)) as f32, ((1.0 - fy) * f64::from(self.height)) as f32)
    }

    /// Integer pixel containing `p`, if inside the image.
    pub fn pixel(&self, p: [f64; 2]) -> Option<(u32, u32)> {
        let (x, y) = self.to_pixel(p);
        let (x, y) = (x.floor(), y.floor());
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (x, y) = (x as u32, y as u32);
        // the upper world edge maps onto the last row/column
        let x = if x == self.width { x - 1 } else { x };
        let y = if y == self.height { y - 1 } else { y };
        (x < self.width && y < self.height).then_some((x, y))
    }

    fn for_bounds(b: &Bounds<f64>, width: u32, height: u32) -> Self {
        Viewport {
            x_range: [b.lower()[0], b.upper()[0]],
            y_range: [b.lower()[1], b.upper()[1]],
            width,
            height,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub image: RgbImage,
    pub viewport: Viewport,
}

impl Rendered {
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut buf = Cursor::new(Vec::new());
        self.image.write_to(&mut buf, ImageFormat::Png)?;
        Ok(buf.into_inner())
    }

    /// Binary `P6` portable pixmap.
    pub fn to_ppm(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        PnmEncoder::new(&mut buf)
            .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
            .write_image(self.image.as_raw(), self.image.width(), self.image.height(), ExtendedColorType::Rgb8)?;
        Ok(buf)
    }

    /// Writes PNG or PPM by extension through a temporary file and a rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        let bytes = match ext.as_deref() {
            Some("png") => self.to_png()?,
            Some("ppm") | Some("pnm") => self.to_ppm()?,
            _ => return Err(Error::invalid(format!("unsupported image extension: {}", path.display()))),
        };
        write_atomic(path, &bytes)
    }
}

/// Replaces `path` with `bytes` so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn draw_overlays(img: &mut RgbImage, vp: &Viewport, overlays: &[Overlay]) {
    for o in overlays {
        let color = Rgb(o.color);
        match o.points.as_slice() {
            [] => {}
            [p] => {
                let (x, y) = vp.to_pixel(*p);
                draw_cross_mut(img, color, x as i32, y as i32);
            }
            pts => {
                for w in pts.windows(2) {
                    let (a, b) = (vp.to_pixel(w[0]), vp.to_pixel(w[1]));
                    draw_line_segment_mut(img, a, b, color);
                    draw_line_segment_mut(img, (a.0 + 1.0, a.1), (b.0 + 1.0, b.1), color);
                }
            }
        }
    }
}

fn draw_markers(img: &mut RgbImage, vp: &Viewport, markers: &[Marker], style: &RenderStyle) {
    let r = style.marker_radius;
    for m in markers {
        let color = Rgb(m.color.unwrap_or(style.marker_color));
        let (x, y) = vp.to_pixel(m.at);
        let (x, y) = (x as i32, y as i32);
        match m.glyph {
            Glyph::Cross => {
                for d in -1..=1 {
                    let (fx, fy, fr) = (x as f32, y as f32, r as f32);
                    draw_line_segment_mut(img, (fx - fr, fy + d as f32), (fx + fr, fy + d as f32), color);
                    draw_line_segment_mut(img, (fx + d as f32, fy - fr), (fx + d as f32, fy + fr), color);
                }
            }
            Glyph::Circle => {
                draw_hollow_circle_mut(img, (x, y), r, color);
                draw_hollow_circle_mut(img, (x, y), r - 1, color);
                img.put_pixel_checked(x, y, color);
            }
            Glyph::Square => {
                let side = (2 * r + 1) as u32;
                draw_hollow_rect_mut(img, Rect::at(x - r, y - r).of_size(side, side), color);
                draw_hollow_rect_mut(img, Rect::at(x - r + 1, y - r + 1).of_size(side - 2, side - 2), color);
                img.put_pixel_checked(x, y, color);
            }
        }
    }
}

trait PutChecked {
    fn put_pixel_checked(&mut self, x: i32, y: i32, c: Rgb<u8>);
}

impl PutChecked for RgbImage {
    fn put_pixel_checked(&mut self, x: i32, y: i32, c: Rgb<u8>) {
        if x >= 0 && y >= 0 && (x as u32) < self.width() && (y as u32) < self.height() {
            self.put_pixel(x as u32, y as u32, c);
        }
    }
}

/// Paints one color per grid cell, row `iy = 0` at the bottom.
fn paint_cells(grid: &GridSpec<f64>, style: &RenderStyle, color: impl Fn(usize) -> Rgb<u8>) -> Rendered {
    let [rx, ry] = grid.resolution();
    let ppc = style.pixels_per_cell;
    let (w, h) = (rx as u32 * ppc, ry as u32 * ppc);
    let img = RgbImage::from_fn(w, h, |px, py| {
        let ix = (px / ppc) as usize;
        let iy = ry - 1 - (py / ppc) as usize;
        color(grid.index(ix, iy))
    });
    Rendered {
        image: img,
        viewport: Viewport::for_bounds(grid.bounds(), w, h),
    }
}

/// Renders heights in gray (light far from efficient sets) and efficient
/// cells from dark blue (non-dominated) to dark red (most dominated).
pub fn render_plot(
    field: &PlotField<f64>,
    style: &RenderStyle,
    overlays: &[Overlay],
    markers: &[Marker],
) -> Result<Rendered> {
    style.validate()?;
    if field.is_empty() || !field.is_complete() {
        return Err(Error::invalid("cannot render an empty or incomplete field"));
    }
    let scale = style.height_scale;
    let h_max = scale.apply(field.max_height());
    let d_max = field.max_dominance_count();
    let mut out = paint_cells(field.grid(), style, |i| {
        if field.is_efficient(i) {
            let c = field.dominance_count(i).unwrap_or(0);
            let t = if d_max == 0 { 0.0 } else { c as f64 / d_max as f64 };
            style.dominance_color(t)
        } else {
            let t = if h_max > 0.0 { scale.apply(field.height(i)) / h_max } else { 0.0 };
            style.gray(t)
        }
    });
    draw_overlays(&mut out.image, &out.viewport, overlays);
    draw_markers(&mut out.image, &out.viewport, markers, style);
    Ok(out)
}

/// Heatmap of `f` over the grid cells, darkest at the lowest value.
pub fn render_decision_space(
    f: &ScalarProblem<f64>,
    grid: &GridSpec<f64>,
    style: &RenderStyle,
    overlays: &[Overlay],
    markers: &[Marker],
) -> Result<Rendered> {
    style.validate()?;
    let fb = f.bounds();
    if fb.dim() != 2 || !fb.contains(grid.bounds().lower()) || !fb.contains(grid.bounds().upper()) {
        return Err(Error::invalid("grid must lie inside the problem box"));
    }
    let values: Vec<f64> = (0..grid.len()).into_par_iter().map(|i| f.eval(&grid.center(i))).collect();
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("objective value {v} on the grid")));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scaled: Vec<f64> = values.iter().map(|&v| style.height_scale.apply(v - lo)).collect();
    let hi = scaled.iter().copied().fold(0.0, f64::max);
    let mut out = paint_cells(grid, style, |i| style.gray(if hi > 0.0 { scaled[i] / hi } else { 0.0 }));
    draw_overlays(&mut out.image, &out.viewport, overlays);
    draw_markers(&mut out.image, &out.viewport, markers, style);
    Ok(out)
}

fn padded_range(lo: f64, hi: f64) -> [f64; 2] {
    if !(hi > lo) {
        return [lo - 0.5, lo + 0.5];
    }
    let m = 0.05 * (hi - lo);
    [lo - m, hi + m]
}

/// Objective-space view: efficient cells colored by dominance count, the
/// trace's `(f1, f2)` path, and a vertical line at `f1_best`.
pub fn render_objective_space(
    field: &PlotField<f64>,
    trace: Option<&SearchTrace<f64>>,
    f1_best: f64,
    style: &RenderStyle,
) -> Result<Rendered> {
    style.validate()?;
    if !field.is_complete() {
        return Err(Error::invalid("cannot render an incomplete field"));
    }
    let cells: Vec<usize> = field.efficient_cells().collect();
    let path: Vec<[f64; 2]> = trace
        .map(|t| t.entries().iter().filter_map(|e| e.f2.map(|f2| [e.f1, f2])).collect())
        .unwrap_or_default();

    let mut xs: Vec<f64> = vec![f1_best];
    let mut ys: Vec<f64> = Vec::new();
    for &c in &cells {
        let o = field.objectives(c);
        xs.push(o.f1);
        ys.push(o.f2);
    }
    for p in &path {
        xs.push(p[0]);
        ys.push(p[1]);
    }
    let finite = |v: &f64| v.is_finite();
    if !xs.iter().all(finite) || !ys.iter().all(finite) {
        return Err(Error::NonFinite("objective-space data".into()));
    }
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_range = if ys.is_empty() { [-0.5, 0.5] } else { padded_range(min(&ys), max(&ys)) };
    let vp = Viewport {
        x_range: padded_range(min(&xs), max(&xs)),
        y_range,
        width: style.plot_size,
        height: style.plot_size,
    };

    let mut img = RgbImage::from_pixel(vp.width, vp.height, Rgb(style.background));
    let d_max = field.max_dominance_count();
    for &c in &cells {
        let o = field.objectives(c);
        let t = if d_max == 0 { 0.0 } else { field.dominance_count(c).unwrap_or(0) as f64 / d_max as f64 };
        if let Some((x, y)) = vp.pixel([o.f1, o.f2]) {
            let color = style.dominance_color(t);
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                img.put_pixel_checked(x as i32 + dx, y as i32 + dy, color);
            }
        }
    }
    draw_overlays(&mut img, &vp, &[Overlay { points: path, color: style.path_color }]);
    let line = Rgb(style.line_color);
    if let Some((x, _)) = vp.pixel([f1_best, vp.y_range[0]]) {
        for y in 0..vp.height {
            img.put_pixel(x, y, line);
        }
    }
    Ok(Rendered { image: img, viewport: vp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{build_grid, compute_plot_field, mo_gradient_field};
    use crate::moization::make_biobjective;
    use crate::point::Point;

    fn bi_sphere_field(res: usize) -> PlotField<f64> {
        let b = Bounds::cube(2, -5.0, 5.0).unwrap();
        let f1 = ScalarProblem::sphere(Point::zeros(2), b.clone()).unwrap();
        let p = make_biobjective(f1, Point::from(vec![-3.5, -2.5])).unwrap();
        compute_plot_field(&p, &build_grid(b, [res, res]).unwrap(), 0.1).unwrap()
    }

    #[test]
    fn plot_dimensions_follow_pixels_per_cell() {
        let field = bi_sphere_field(100);
        let img = render_plot(&field, &RenderStyle::default(), &[], &[]).unwrap();
        assert_eq!(img.image.dimensions(), (400, 400));
    }

    #[test]
    fn plot_bytes_are_deterministic() {
        let field = bi_sphere_field(30);
        let ov = Overlay { points: vec![[4.0, 4.0], [0.0, 0.0], [-3.5, -2.5]], color: TRACE_PALETTE[0] };
        let mk = [Marker::new([0.0, 0.0], Glyph::Cross)];
        let a = render_plot(&field, &RenderStyle::default(), &[ov.clone()], &mk).unwrap();
        let b = render_plot(&field, &RenderStyle::default(), &[ov], &mk).unwrap();
        assert_eq!(a.to_png().unwrap(), b.to_png().unwrap());
        assert_eq!(a.to_ppm().unwrap(), b.to_ppm().unwrap());
    }

    #[test]
    fn all_efficient_field_is_uniform_dark_blue() {
        // f1 = 20 - f2 makes every pair of cells mutually non-dominated
        let b = Bounds::cube(2, -5.0, 5.0).unwrap();
        let f1 = ScalarProblem::custom("anti", b.clone(), |x: &[f64]| 20.0 - (x[0] + 3.5).powi(2) - (x[1] + 2.5).powi(2));
        let p = make_biobjective(f1, Point::from(vec![-3.5, -2.5])).unwrap();
        let mut field = mo_gradient_field(&p, &build_grid(b, [10, 10]).unwrap()).unwrap();
        field.detect_efficient_cells(2.0).unwrap();
        field.accumulate_heights().unwrap();
        field.dominance_counts().unwrap();
        assert_eq!(field.max_dominance_count(), 0);
        let img = render_plot(&field, &RenderStyle::default(), &[], &[]).unwrap();
        assert!(img.image.pixels().all(|p| p.0 == [0, 0, 139]));
    }

    #[test]
    fn incomplete_field_is_rejected() {
        let b = Bounds::cube(2, -5.0, 5.0).unwrap();
        let f1 = ScalarProblem::sphere(Point::zeros(2), b.clone()).unwrap();
        let p = make_biobjective(f1, Point::from(vec![-3.5, -2.5])).unwrap();
        let field = mo_gradient_field(&p, &build_grid(b, [10, 10]).unwrap()).unwrap();
        assert!(render_plot(&field, &RenderStyle::default(), &[], &[]).unwrap_err().is_usage());
    }

    #[test]
    fn rastrigin_heatmap_darkest_near_origin() {
        let b = Bounds::cube(2, -5.0, 5.0).unwrap();
        let f = ScalarProblem::rastrigin(b.clone());
        let grid = build_grid(b, [100, 100]).unwrap();
        let style = RenderStyle { pixels_per_cell: 1, ..RenderStyle::default() };
        let img = render_decision_space(&f, &grid, &style, &[], &[]).unwrap();
        let (mut best, mut at) = (u8::MAX, (0, 0));
        for (x, y, p) in img.image.enumerate_pixels() {
            if p.0[0] < best {
                best = p.0[0];
                at = (x, y);
            }
        }
        let (ox, oy) = img.viewport.pixel([0.0, 0.0]).unwrap();
        assert!(at.0.abs_diff(ox) <= 1 && at.1.abs_diff(oy) <= 1, "{at:?} vs {:?}", (ox, oy));
    }

    #[test]
    fn constant_function_is_uniform() {
        let b = Bounds::cube(2, -1.0, 1.0).unwrap();
        let f = ScalarProblem::custom("const", b.clone(), |_: &[f64]| 3.0);
        let img = render_decision_space(&f, &build_grid(b, [8, 8]).unwrap(), &RenderStyle::default(), &[], &[]).unwrap();
        let first = *img.image.get_pixel(0, 0);
        assert!(img.image.pixels().all(|p| *p == first));
    }

    #[test]
    fn objective_space_has_vertical_line() {
        let field = bi_sphere_field(40);
        let style = RenderStyle::default();
        let img = render_objective_space(&field, None, 1.0, &style).unwrap();
        let (x, _) = img.viewport.pixel([1.0, img.viewport.y_range[0]]).unwrap();
        assert!((0..img.image.height()).all(|y| img.image.get_pixel(x, y).0 == style.line_color));
        let again = render_objective_space(&field, None, 1.0, &style).unwrap();
        assert_eq!(img.to_png().unwrap(), again.to_png().unwrap());
    }

    #[test]
    fn viewport_flips_y() {
        let vp = Viewport { x_range: [0.0, 10.0], y_range: [0.0, 10.0], width: 100, height: 100 };
        assert_eq!(vp.pixel([0.0, 0.0]), Some((0, 99)));
        assert_eq!(vp.pixel([10.0, 10.0]), Some((99, 0)));
        assert_eq!(vp.pixel([11.0, 0.0]), None);
    }

    #[test]
    fn atomic_save_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        let field = bi_sphere_field(10);
        let img = render_plot(&field, &RenderStyle::default(), &[], &[]).unwrap();
        img.save(&dir.path().join("a.png")).unwrap();
        img.save(&dir.path().join("a.ppm")).unwrap();
        let ppm = std::fs::read(dir.path().join("a.ppm")).unwrap();
        assert!(ppm.starts_with(b"P6"));
        assert!(img.save(&dir.path().join("a.gif")).unwrap_err().is_usage());
    }
}
