use dtseg::fusion::lre;
use dtseg::metrics::{evaluate, pri, ContingencyTable};
use dtseg::SegmentationMap;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gt = SegmentationMap::new(4, 4, vec![0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1])?;
    // Right half further split into top and bottom.
    let pred = SegmentationMap::compacted(4, 4, &[0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 2, 2, 0, 0, 2, 2])?;

    let table = ContingencyTable::new(&pred, &gt)?;
    println!("contingency {:?}, n = {}", table.shape(), table.total());

    let r = evaluate(&pred, &gt)?;
    println!("PR {:.4}  GCE {:.4}  VoI {:.4}  F {:.4}", r.pr, r.gce, r.voi, r.f_measure);
    // Each predicted segment sits inside one reference segment, so the
    // refinement error in that direction vanishes at every pixel.
    for p in 0..pred.len() {
        assert_eq!(lre(&pred, &gt, p)?, 0.0);
    }

    let other = SegmentationMap::uniform(4, 4);
    println!("PRI over two references: {:.4}", pri(&pred, &[gt, other])?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
