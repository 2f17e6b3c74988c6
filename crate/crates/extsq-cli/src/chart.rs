//! Adams charts: one dot per generator at `(t - s, s)`.

use std::fmt::Write as _;

use extsq::resolution::Resolution;

/// The generator counts of `res` in the window, as `(s, t, count)` with
/// `count > 0`, sorted by `s` then `t`.
pub fn counts(res: &Resolution, s_range: (u32, u32), t_range: (i32, i32)) -> Vec<(u32, i32, usize)> {
    let mut out = Vec::new();
    for s in s_range.0..=s_range.1.min(res.s_max()) {
        let gens = res.generators(s);
        for t in t_range.0..=t_range.1.min(res.t_max()) {
            let n = gens.iter().filter(|g| g.degree == t).count();
            if n > 0 {
                out.push((s, t, n));
            }
        }
    }
    out
}

pub fn tsv(counts: &[(u32, i32, usize)]) -> String {
    let mut out = String::from("s\tt\tcount\n");
    for (s, t, n) in counts {
        writeln!(out, "{s}\t{t}\t{n}").unwrap();
    }
    out
}

const CELL: i32 = 24;
const MARGIN: i32 = 32;

pub fn svg(title: &str, counts: &[(u32, i32, usize)], s_range: (u32, u32), t_range: (i32, i32)) -> String {
    let x_max = (t_range.1 - s_range.0 as i32).max(0);
    let y_max = s_range.1 as i32;
    let width = 2 * MARGIN + CELL * (x_max + 1);
    let height = 2 * MARGIN + CELL * (y_max + 1);
    let px = |x: i32| MARGIN + CELL * x + CELL / 2;
    let py = |y: i32| height - MARGIN - CELL * y - CELL / 2;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(out, "<title>{}</title>", escape(title)).unwrap();
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    for x in 0..=x_max {
        if x % 4 == 0 {
            writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{x}</text>"#,
                px(x),
                height - MARGIN / 3
            )
            .unwrap();
        }
    }
    for y in 0..=y_max {
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{y}</text>"#,
            MARGIN / 2,
            py(y) + 4
        )
        .unwrap();
    }
    for &(s, t, n) in counts {
        let x = t - s as i32;
        if x < 0 || x > x_max || s > s_range.1 {
            continue;
        }
        for k in 0..n {
            let dx = (2 * k as i32 - (n as i32 - 1)) * 4;
            writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="3" fill="black"><title>({s}, {t})</title></circle>"#,
                px(x) + dx,
                py(s as i32)
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
