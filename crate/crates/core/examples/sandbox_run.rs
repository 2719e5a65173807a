//! Compile a program and run it under limits.

use hackforge::model::ResourceLimits;
use hackforge::sandbox::{classify_run, Sandbox};

fn main() {
    let sb = Sandbox::shared();
    let src = "#include <cstdio>\nint main(){int a,b;scanf(\"%d %d\",&a,&b);printf(\"%d\\n\",a+b);}\n";
    let bin = sb.compile(src, "gpp17").expect("compiles");
    let limits = ResourceLimits::new(1000, 256).unwrap();
    let r = sb.execute(&bin, b"2 40\n", &limits).expect("runs");
    println!("status {:?}, stdout {:?}, {} ms", classify_run(&r, &limits), String::from_utf8_lossy(&r.stdout), r.cpu_time_ms);
    println!("available toolchains: {:?}", sb.toolchains().available_ids());
}
