//! Gnuplot script for the log-log convergence plots of a history file.

pub fn gnuplot_script(history: &str, title: &str) -> String {
    format!(
        r#"# gnuplot {title}
set datafile separator ","
set logscale xy
set key bottom left
set grid
set terminal pngcairo size 1200,500
set output "convergence.png"
set multiplot layout 1,2
set xlabel "ndof"
set ylabel "eta"
plot "{history}" every ::1 using 3:5 with linespoints title "eta", \
     "{history}" every ::1 using 3:6 with linespoints title "zeta"
set xlabel "cumulative cost"
plot "{history}" every ::1 using 7:5 with linespoints title "eta"
unset multiplot
"#
    )
}
