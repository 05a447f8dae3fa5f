//! The plain-text tensor format: write, print and read back.
//!
//! cargo run --example btf_io [PATH]

use broadcast_tensor::{btf, DenseTensor, Result};

fn main() -> Result<()> {
    let x = DenseTensor::from_dims(&[2, 3, 2], (1..=12).map(|v| f64::from(v) / 3.0).collect())?;
    print!("{}", btf::to_string(&x));

    let path = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("btf_io_example.btf"));
    btf::write(&x, &path)?;
    let back = btf::read(&path)?;
    println!("wrote {}, read back identical: {}", path.display(), back == x);
    Ok(())
}
