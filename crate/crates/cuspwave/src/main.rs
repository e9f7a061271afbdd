fn main() {
    cuspwave::init_threads();
    println!("cuspwave");
}
