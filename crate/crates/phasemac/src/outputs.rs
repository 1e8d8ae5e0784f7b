//! Output-file plumbing: atomic writes and gnuplot script emission.

use std::fs;
use std::io;
use std::path::Path;

/// Write via a temp file in the same directory, then rename into place, so
/// a crash never leaves a half-written artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

pub fn atomic_write_str(path: &Path, text: &str) -> io::Result<()> {
    atomic_write(path, text.as_bytes())
}

/// Gnuplot script for the batch-size sweep CSV.
pub fn batch_sweep_gnuplot(csv_name: &str) -> String {
    format!(
        "# gnuplot script v1: batch size vs memory/compute energy ratio\n\
         set datafile separator ','\n\
         set logscale x 2\n\
         set logscale y 10\n\
         set xlabel 'batch size'\n\
         set ylabel 'E_Memory / E_MAC'\n\
         set grid\n\
         plot '{csv_name}' every ::1 using 1:2 with linespoints title 'memory/compute', \\\n\
              1.0 with lines dashtype 2 title 'crossover'\n"
    )
}

/// Gnuplot script for per-window anomaly scores at each resolution.
pub fn anomaly_scores_gnuplot(csv_name: &str, resolutions: &[String]) -> String {
    let mut plot_terms: Vec<String> = Vec::new();
    for r in resolutions {
        plot_terms.push(format!(
            "'{csv_name}' every ::1 using ($1 eq '{r}' ? $2 : NaN):3 with linespoints title '{r}'"
        ));
    }
    format!(
        "# gnuplot script v1: anomaly score per window and resolution\n\
         set datafile separator ','\n\
         set xlabel 'window'\n\
         set ylabel 'anomaly score (MSE)'\n\
         set grid\n\
         plot {}\n",
        plot_terms.join(", \\\n     ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_tmp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        atomic_write_str(&path, "a,b\n1,2\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        assert!(!path.with_extension("tmp").exists());
        // Overwrite is atomic too.
        atomic_write_str(&path, "c\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "c\n");
    }

    #[test]
    fn gnuplot_scripts_reference_the_csv() {
        let s = batch_sweep_gnuplot("batch_sweep.csv");
        assert!(s.contains("batch_sweep.csv"));
        let a = anomaly_scores_gnuplot("scores.csv", &["float".into(), "8".into()]);
        assert!(a.contains("scores.csv"));
        assert!(a.contains("'8'"));
    }
}
