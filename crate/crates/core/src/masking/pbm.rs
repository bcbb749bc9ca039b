//! Plain (P1) portable bitmap dump of masks for inspection.

use std::fmt::Write as _;
use std::path::Path;

use super::binary::BinaryMask;
use crate::error::{Error, Result};

pub fn to_pbm_string(mask: &BinaryMask) -> String {
    let mut s = format!("P1\n{} {}\n", mask.width(), mask.height());
    for y in 0..mask.height() {
        let mut line = String::with_capacity(2 * mask.width());
        for x in 0..mask.width() {
            if x > 0 {
                // keep lines under the 70 character limit of the format
                line.push(if x % 35 == 0 { '\n' } else { ' ' });
            }
            line.push(if mask.at(x, y) { '1' } else { '0' });
        }
        let _ = writeln!(s, "{line}");
    }
    s
}

pub fn write_pbm(mask: &BinaryMask, path: &Path) -> Result<()> {
    std::fs::write(path, to_pbm_string(mask)).map_err(|e| Error::io(path, e))
}

pub fn read_pbm(path: &Path) -> Result<BinaryMask> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut tokens = text.lines().enumerate().flat_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        line.split_whitespace().map(move |t| (i + 1, t))
    });
    match tokens.next() {
        Some((_, "P1")) => {}
        Some((line, t)) => return Err(Error::parse(&name, line, format!("bad magic {t:?}"))),
        None => return Err(Error::parse(&name, 1, "empty file")),
    }
    let mut dim = |what: &str| -> Result<usize> {
        let (line, t) = tokens
            .next()
            .ok_or_else(|| Error::parse(&name, 1, format!("missing {what}")))?;
        t.parse()
            .map_err(|_| Error::parse(&name, line, format!("bad {what} {t:?}")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    let mut mask = BinaryMask::new(width, height);
    let mut last_line = 2;
    for i in 0..width * height {
        let (line, t) = tokens
            .next()
            .ok_or_else(|| Error::parse(&name, last_line, "truncated pixel data"))?;
        last_line = line;
        // P1 allows digits without separators
        match t {
            "0" => {}
            "1" => mask.set(i % width, i / width, true),
            _ => return Err(Error::parse(&name, line, format!("bad pixel {t:?}"))),
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = BinaryMask::from_fn(80, 5, |x, y| (x * 7 + y * 3) % 5 == 0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pbm");
        write_pbm(&m, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("P1\n80 5\n"));
        assert!(text.lines().all(|l| l.len() <= 70));
        assert_eq!(read_pbm(&p).unwrap(), m);
    }
}
