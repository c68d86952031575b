fn main() {
    println!("gapkac");
}
