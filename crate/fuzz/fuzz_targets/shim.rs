use std::path::Path;

/// Runs `f` over every file named on the command line; directories are
/// walked one level deep. Lets the targets replay a corpus without libFuzzer.
pub fn replay(f: fn(&[u8])) {
    let mut count = 0;
    for arg in std::env::args_os().skip(1) {
        let path = Path::new(&arg);
        let files: Vec<_> = if path.is_dir() {
            std::fs::read_dir(path)
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect()
        } else {
            vec![path.to_path_buf()]
        };
        for file in files {
            f(&std::fs::read(&file).unwrap());
            count += 1;
        }
    }
    eprintln!("replayed {count} inputs");
}
