use super::{CpwlError, SimplicialCpwl};

impl SimplicialCpwl {
    /// Splits simplex `s` into `d + 1` simplices around its barycenter. The
    /// new vertex takes the interpolated value, so the function is unchanged.
    pub fn subdivide(&self, s: usize) -> Result<SimplicialCpwl, CpwlError> {
        self.star_refine(&[s])
    }

    /// Barycentric star refinement of every simplex at once.
    pub fn refine_barycentric(&self) -> Result<SimplicialCpwl, CpwlError> {
        let all: Vec<usize> = (0..self.simplices.len()).collect();
        self.star_refine(&all)
    }

    fn star_refine(&self, targets: &[usize]) -> Result<SimplicialCpwl, CpwlError> {
        let d = self.dim;
        let mut vertices = self.vertices.clone();
        let mut values = self.values.clone();
        let mut simplices = Vec::with_capacity(self.simplices.len() + d * targets.len());
        let mut split = vec![false; self.simplices.len()];
        for &s in targets {
            if s >= self.simplices.len() {
                return Err(CpwlError::SimplexIndex(s));
            }
            split[s] = true;
        }
        for (s, simplex) in self.simplices.iter().enumerate() {
            if !split[s] {
                simplices.push(simplex.clone());
                continue;
            }
            let m = (d + 1) as f64;
            let center: Vec<f64> = (0..d)
                .map(|a| simplex.iter().map(|&v| self.vertices[v][a]).sum::<f64>() / m)
                .collect();
            let piece = &self.pieces[s];
            values.push(piece.eval(&center));
            vertices.push(center);
            let c = vertices.len() - 1;
            for skip in 0..=d {
                let mut child = simplex.clone();
                child[skip] = c;
                simplices.push(child);
            }
        }
        SimplicialCpwl::new(d, vertices, simplices, values)
    }
}
