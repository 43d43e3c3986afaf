//! Reading, validating and writing space files.

use ihdual::spacefile::SpaceFile;

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    for name in ["cone_S1.json", "lone_triangle.json"] {
        let file = SpaceFile::load(format!("{dir}/{name}")).expect("readable");
        match file.to_complex() {
            Ok(x) => {
                let v = x.validate();
                println!("{name}: valid, dimension {}, {} strata, f-vector {:?}", x.dim(), v.strata, x.f_vector());
            }
            Err(e) => println!("{name}: {e} (simplex {:?})", e.offending_simplex()),
        }
    }
    let s1 = ihdual::corpus::circle();
    print!("{}", SpaceFile::from_complex(&s1).to_json());
}
