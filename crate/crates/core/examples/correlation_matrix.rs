//! Spearman correlations between word-level and sentence-level scores
//! across trained models, pooled and per combination method.
//!
//!     cargo run --example correlation_matrix

use wordgate::analysis::{
    grouped_correlation_matrices, performance_correlation_matrix, CorrelationMatrix, ResultTable,
};

fn show(title: &str, m: &CorrelationMatrix) {
    println!("{title}");
    println!(
        "{:>10} {}",
        "",
        m.sentence_tasks.iter().map(|t| format!("{t:>8}")).collect::<String>()
    );
    for (task, row) in m.word_tasks.iter().zip(&m.values) {
        let cells: String = row
            .iter()
            .map(|v| v.map_or_else(|| format!("{:>8}", "-"), |r| format!("{r:>8.3}")))
            .collect();
        println!("{task:>10} {cells}");
    }
}

fn main() -> wordgate::Result<()> {
    // one row per trained model: (method, seed)
    let models = [
        ("w", 1),
        ("w", 2),
        ("w", 3),
        ("vg", 1),
        ("vg", 2),
        ("vg", 3),
        ("sg", 1),
        ("sg", 2),
        ("sg", 3),
    ];
    let labels: Vec<String> = models.iter().map(|(m, s)| format!("{m}-{s}")).collect();
    let groups: Vec<String> = models.iter().map(|(m, _)| m.to_string()).collect();
    let word = ResultTable::new(
        labels.clone(),
        vec!["simlex".into(), "card660".into()],
        vec![
            vec![31.2, 12.0],
            vec![30.4, 14.1],
            vec![32.0, 11.5],
            vec![40.8, 30.2],
            vec![41.9, 28.7],
            vec![40.1, 33.0],
            vec![39.7, 25.9],
            vec![41.5, 27.1],
            vec![40.9, 24.4],
        ],
    )?;
    let sent = ResultTable::new(
        labels,
        vec!["sick-r".into(), "sts16".into(), "trec".into()],
        vec![
            vec![85.1, 70.2, 88.0],
            vec![84.7, 69.8, 89.2],
            vec![85.5, 70.9, 87.4],
            vec![86.0, 72.5, 88.8],
            vec![86.4, 72.1, 87.9],
            vec![85.8, 73.0, 89.6],
            vec![85.9, 71.8, 88.1],
            vec![86.2, 72.4, 88.5],
            vec![85.7, 71.2, 87.7],
        ],
    )?;
    show("all models", &performance_correlation_matrix(&word, &sent)?);
    for (method, m) in grouped_correlation_matrices(&word, &sent, &groups)? {
        show(&format!("\n{method}"), &m);
    }
    Ok(())
}
