//! Treebank tokenization of the arguments, or of stdin line by line.
//!
//!     cargo run --example tokenize -- "They can't go, it's 5 p.m."
//!     cat sentences.txt | cargo run --example tokenize

use std::io::BufRead;

use wordgate::data::tokenize;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if !args.is_empty() {
        println!("{}", tokenize(&args.join(" ")).join(" | "));
        return;
    }
    for line in std::io::stdin().lock().lines() {
        let line = line.expect("readable stdin");
        println!("{}", tokenize(&line).join(" | "));
    }
}
