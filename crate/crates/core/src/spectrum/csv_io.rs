//! Ground-truth dump/load: header `lx,ly,ts,chn,avl,param0[,param1…]`, one
//! record per (cell, channel) in (lx, ly, chn) order.

use std::io::{Read, Write};

use super::{DbError, EpochDay, GridSpec, ParamDomain, SpectrumDb};

fn csv_err(e: impl std::fmt::Display) -> DbError {
    DbError::Csv(e.to_string())
}

pub fn write_csv<W: Write>(db: &SpectrumDb, out: W) -> Result<(), DbError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "lx".to_string(),
        "ly".into(),
        "ts".into(),
        "chn".into(),
        "avl".into(),
    ];
    header.extend((0..db.domain().len()).map(|i| format!("param{i}")));
    w.write_record(&header).map_err(csv_err)?;
    let mut record = Vec::with_capacity(header.len());
    for row in db.rows() {
        record.clear();
        record.push(row.lx.to_string());
        record.push(row.ly.to_string());
        record.push(row.ts.0.to_string());
        record.push(row.chn.to_string());
        record.push((row.avl as u8).to_string());
        record.extend(row.values.iter().map(|v| v.to_string()));
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)?;
    Ok(())
}

/// Loads a dense dump. The grid shape is inferred from the largest indices;
/// every (cell, channel) must appear exactly once and every parameter value
/// must lie in `domain`.
pub fn read_csv<R: Read>(input: R, domain: ParamDomain) -> Result<SpectrumDb, DbError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let width = domain.len();
    let expected: Vec<String> = ["lx", "ly", "ts", "chn", "avl"]
        .iter()
        .map(|s| s.to_string())
        .chain((0..width).map(|i| format!("param{i}")))
        .collect();
    if headers.iter().collect::<Vec<_>>() != expected.iter().map(String::as_str).collect::<Vec<_>>()
    {
        return Err(DbError::Csv(format!("unexpected header {:?}", headers)));
    }

    struct Rec {
        lx: u32,
        ly: u32,
        chn: u16,
        avl: bool,
        values: Vec<u32>,
    }
    let mut recs = Vec::new();
    let mut day: Option<u64> = None;
    for (line, result) in reader.records().enumerate() {
        let r = result.map_err(csv_err)?;
        let field = |i: usize| -> Result<&str, DbError> {
            r.get(i)
                .ok_or_else(|| DbError::Csv(format!("row {line}: missing field {i}")))
        };
        let num = |i: usize| -> Result<u64, DbError> {
            field(i)?
                .trim()
                .parse::<u64>()
                .map_err(|e| DbError::Csv(format!("row {line}: {e}")))
        };
        let ts = num(2)?;
        if *day.get_or_insert(ts) != ts {
            return Err(DbError::Csv(format!(
                "row {line}: mixed days {ts} and {}",
                day.unwrap()
            )));
        }
        let avl = match num(4)? {
            0 => false,
            1 => true,
            v => return Err(DbError::Csv(format!("row {line}: avl={v}"))),
        };
        let values = (0..width)
            .map(|k| num(5 + k).map(|v| v as u32))
            .collect::<Result<Vec<_>, _>>()?;
        for (k, &v) in values.iter().enumerate() {
            if v as usize >= domain.params()[k].values.len() {
                return Err(DbError::Csv(format!(
                    "row {line}: param{k}={v} outside domain"
                )));
            }
        }
        recs.push(Rec {
            lx: u32::try_from(num(0)?).map_err(csv_err)?,
            ly: u32::try_from(num(1)?).map_err(csv_err)?,
            chn: u16::try_from(num(3)?).map_err(csv_err)?,
            avl,
            values,
        });
    }
    if recs.is_empty() {
        return Err(DbError::Csv("no rows".into()));
    }

    let side = recs.iter().map(|r| r.lx.max(r.ly)).max().unwrap() + 1;
    let n_ch = recs.iter().map(|r| r.chn).max().unwrap() + 1;
    let grid = GridSpec::new(side, n_ch)?;
    if recs.len() as u64 != grid.row_count() {
        return Err(DbError::Csv(format!(
            "{} rows for a {side}x{side} grid with {n_ch} channels",
            recs.len()
        )));
    }
    let rows = grid.row_count() as usize;
    let mut seen = vec![false; rows];
    let mut avl = vec![false; rows];
    let mut values = vec![0u32; rows * width];
    for r in recs {
        let idx = (r.lx as usize * side as usize + r.ly as usize) * n_ch as usize + r.chn as usize;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(DbError::Csv(format!(
                "duplicate row ({}, {}, {})",
                r.lx, r.ly, r.chn
            )));
        }
        avl[idx] = r.avl;
        values[idx * width..(idx + 1) * width].copy_from_slice(&r.values);
    }
    Ok(SpectrumDb::from_parts(
        grid,
        EpochDay(day.unwrap()),
        domain,
        avl,
        values,
    ))
}
