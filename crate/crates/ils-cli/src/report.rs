//! CSV report rendering. Output is byte-deterministic: fields are quoted
//! only when they contain a comma, quote, or newline, rows end with `\n`.

use informledge::retrieve::ConeMetrics;
use informledge::store::SystemStats;
use informledge::{EmbedReport, ScenarioStats};

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// Per-statement embedding scenarios: one `ScN` row per report.
pub fn render_table2(reports: &[(EmbedReport, ScenarioStats)]) -> String {
    let mut out =
        String::from("scenario,nodes_in_knowledge,nodes_added_pct,links_traversed,links_added_pct\n");
    for (index, (report, stats)) in reports.iter().enumerate() {
        out.push_str(&format!(
            "Sc{},{},{:.2},{},{:.2}\n",
            index + 1,
            report.nodes_in_statement,
            stats.nodes_added_pct,
            report.links_traversed,
            stats.links_added_pct
        ));
    }
    out
}

/// Cone rows: apex label, height, and `m:width` pairs joined by spaces.
pub fn render_cones(rows: &[ConeMetrics]) -> String {
    let mut out = String::from("apex,height,levels\n");
    for row in rows {
        let levels = row
            .levels
            .iter()
            .map(|(level, width)| format!("{level}:{width}"))
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(&row.apex_label),
            row.height,
            csv_field(&levels)
        ));
    }
    out
}

/// Domain partition rows.
pub fn render_stats(stats: &SystemStats) -> String {
    let mut out = String::from("domain,l,nodes\n");
    for domain in &stats.domains {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(&domain.name),
            domain.l,
            domain.nodes
        ));
    }
    out
}
