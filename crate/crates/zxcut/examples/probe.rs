fn main() {
    let d = zxcut::builders::build_msc_d3();
    let r = zxcut::rewrite::full_reduce(&d);
    println!("d3: raw t={} vertices={}, reduced t={} vertices={}",
        d.t_count(), d.num_vertices(), r.t_count(), r.num_vertices());
    let d5 = zxcut::builders::build_msc_d5();
    let t0 = std::time::Instant::now();
    let r5 = zxcut::rewrite::full_reduce(&d5);
    println!("d5: raw t={} vertices={}, reduced t={} vertices={} ({:?})",
        d5.t_count(), d5.num_vertices(), r5.t_count(), r5.num_vertices(), t0.elapsed());
}
