//! Planar points and a uniform grid for fixed-radius neighbor queries.

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn distance_squared(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }
}

/// Bucket grid with cell side equal to the query radius, so every neighbor of a
/// point lies in the 3×3 block of cells around it.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    radius: f64,
    origin: Point,
    cols: usize,
    rows: usize,
    cell_start: Vec<usize>,
    members: Vec<usize>,
}

impl SpatialGrid {
    pub fn new(points: &[Point], radius: f64) -> Self {
        assert!(radius > 0.0, "grid radius must be positive");
        let (mut lo, mut hi) = (Point::new(0.0, 0.0), Point::new(0.0, 0.0));
        if let Some(first) = points.first() {
            lo = *first;
            hi = *first;
        }
        for p in points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let cols = ((hi.x - lo.x) / radius).floor() as usize + 1;
        let rows = ((hi.y - lo.y) / radius).floor() as usize + 1;
        let mut grid = SpatialGrid {
            radius,
            origin: lo,
            cols,
            rows,
            cell_start: vec![0; cols * rows + 1],
            members: vec![0; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|p| grid.cell_of(*p)).collect();
        for &c in &cells {
            grid.cell_start[c + 1] += 1;
        }
        for i in 0..cols * rows {
            grid.cell_start[i + 1] += grid.cell_start[i];
        }
        let mut fill = grid.cell_start.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.members[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    fn coords(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x - self.origin.x) / self.radius).floor().max(0.0) as usize;
        let cy = ((p.y - self.origin.y) / self.radius).floor().max(0.0) as usize;
        (cx.min(self.cols - 1), cy.min(self.rows - 1))
    }

    fn cell_of(&self, p: Point) -> usize {
        let (cx, cy) = self.coords(p);
        cy * self.cols + cx
    }

    /// Calls `visit(j, distance)` for every indexed point `j != skip` within
    /// the radius of `center`, in ascending index order within each cell.
    pub fn for_each_within<F>(&self, points: &[Point], center: Point, skip: usize, mut visit: F)
    where
        F: FnMut(usize, f64),
    {
        let (cx, cy) = self.coords(center);
        let r2 = self.radius * self.radius;
        for y in cy.saturating_sub(1)..=(cy + 1).min(self.rows - 1) {
            for x in cx.saturating_sub(1)..=(cx + 1).min(self.cols - 1) {
                let cell = y * self.cols + x;
                for &j in &self.members[self.cell_start[cell]..self.cell_start[cell + 1]] {
                    if j == skip {
                        continue;
                    }
                    let d2 = center.distance_squared(points[j]);
                    if d2 <= r2 {
                        visit(j, d2.sqrt());
                    }
                }
            }
        }
    }

    /// All neighbors of point `i` within the radius, sorted by index.
    pub fn neighbors(&self, points: &[Point], i: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        self.for_each_within(points, points[i], i, |j, d| out.push((j, d)));
        out.sort_unstable_by_key(|&(j, _)| j);
        out
    }
}

/// Adjacency lists of the unit-disk graph: pairs within `radius`, weighted by
/// Euclidean distance.
pub fn disk_graph(points: &[Point], radius: f64) -> Vec<Vec<(usize, f64)>> {
    let grid = SpatialGrid::new(points, radius);
    (0..points.len()).map(|i| grid.neighbors(points, i)).collect()
}

/// Unweighted eccentricity maximum over the disk graph; `None` if disconnected.
pub fn hop_diameter(adjacency: &[Vec<(usize, f64)>]) -> Option<usize> {
    let n = adjacency.len();
    let mut best = 0;
    let mut depth = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        depth.iter_mut().for_each(|d| *d = usize::MAX);
        depth[start] = 0;
        queue.push_back(start);
        let mut seen = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adjacency[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    best = best.max(depth[v]);
                    seen += 1;
                    queue.push_back(v);
                }
            }
        }
        if seen != n {
            return None;
        }
    }
    Some(best)
}
