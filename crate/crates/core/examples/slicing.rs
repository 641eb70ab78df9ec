// Cutting a video cube into its three families of orthogonal slices.

use dtseg::{PlaneFamily, VideoCube};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // 12 rows, 10 columns, 9 frames; each voxel encodes its own coordinates.
    let cube = VideoCube::from_fn(12, 10, 9, |y, x, t| (y * 10 + x + t) as u8)?;

    let mut total = 0;
    for plane in PlaneFamily::ALL {
        let (rows, cols) = cube.slice_shape(plane);
        let count = cube.slice_count(plane);
        total += count;
        println!("{plane}: {count} slices of {rows} x {cols}");
    }
    assert_eq!(total, 12 + 10 + 9);

    // XT(y = 3) has time on rows and x on columns.
    let xt = cube.slice(PlaneFamily::Xt, 3)?;
    assert_eq!(xt.get(5, 7), cube.get(3, 7, 5));

    // Every other frame only.
    let frames = cube.slices(PlaneFamily::Xy, 2)?;
    assert_eq!(frames.len(), 5);

    let bytes = cube.to_raw_bytes();
    let back = VideoCube::from_raw_bytes(&bytes, "memory".as_ref())?;
    assert_eq!(back, cube);
    println!("raw round trip: {} bytes", bytes.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
