//! JSON kernel files: `{"grid":{"cells":m,"width":Δ},"order":n,"coeffs":[[re,im],…]}`,
//! coefficients flattened row-major with the last index fastest.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ChaosError, Result};
use crate::kernel::{GridSpec, Kernel};
use crate::scalar::Real;

#[derive(Debug, Serialize, Deserialize)]
struct KernelFile {
    grid: GridFile,
    order: usize,
    coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridFile {
    cells: usize,
    width: f64,
}

pub fn kernel_to_json<T: Real>(f: &Kernel<T>) -> Result<String> {
    let file = KernelFile {
        grid: GridFile { cells: f.grid().cells(), width: f.grid().width() },
        order: f.order(),
        coeffs: f.coeffs().iter().map(|c| [c.re.to_f64_lossy(), c.im.to_f64_lossy()]).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn kernel_from_json<T: Real>(text: &str) -> Result<Kernel<T>> {
    let file: KernelFile = serde_json::from_str(text)?;
    let grid = GridSpec::new(file.grid.cells, file.grid.width)?;
    let expected = grid.tensor_len(file.order);
    if expected != Some(file.coeffs.len()) {
        return Err(ChaosError::Format(format!(
            "order {} on {} cells needs {} coefficients, file has {}",
            file.order,
            grid.cells(),
            expected.map_or_else(|| "too many".to_string(), |n| n.to_string()),
            file.coeffs.len()
        )));
    }
    let coeffs = file
        .coeffs
        .iter()
        .map(|&[re, im]| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex::new(T::lit(re), T::lit(im)))
            } else {
                Err(ChaosError::Format("non-finite coefficient".into()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Kernel::from_coeffs(grid, file.order, coeffs)
}

pub fn read_kernel<T: Real>(path: impl AsRef<Path>) -> Result<Kernel<T>> {
    kernel_from_json(&fs::read_to_string(path)?)
}

pub fn write_kernel<T: Real>(f: &Kernel<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, kernel_to_json(f)?)?;
    Ok(())
}
