//! Canonical entry/query encoding. Little-endian, fixed width:
//!
//! ```text
//! u32 lx ‖ u32 ly ‖ u16 chn ‖ u64 ts ‖ u8 param_count ‖ (u8 param_id ‖ u32 value) × param_count
//! ```
//!
//! DB entries and SU queries share this layout, so a query equals an entry
//! byte for byte exactly when the guessed tuple matches a stored row.

use super::{Cell, DbError, DbRow, EpochDay, GridSpec, RowRef, TxParam};

/// Bytes before the parameter list.
pub const ENTRY_FIXED_BYTES: usize = 4 + 4 + 2 + 8 + 1;
const PARAM_BYTES: usize = 1 + 4;

pub fn entry_len(param_count: usize) -> usize {
    ENTRY_FIXED_BYTES + PARAM_BYTES * param_count
}

fn write_tuple<I>(out: &mut Vec<u8>, cell: Cell, chn: u16, ts: EpochDay, count: usize, params: I)
where
    I: Iterator<Item = TxParam>,
{
    out.clear();
    out.extend_from_slice(&cell.lx.to_le_bytes());
    out.extend_from_slice(&cell.ly.to_le_bytes());
    out.extend_from_slice(&chn.to_le_bytes());
    out.extend_from_slice(&ts.0.to_le_bytes());
    out.push(count as u8);
    for p in params {
        out.push(p.param_id);
        out.extend_from_slice(&p.value.to_le_bytes());
    }
}

/// Encodes the query string `y` into `out`, replacing its contents.
pub fn encode_query_into(
    cell: Cell,
    chn: u16,
    ts: EpochDay,
    params: &[TxParam],
    out: &mut Vec<u8>,
) {
    write_tuple(out, cell, chn, ts, params.len(), params.iter().copied());
}

pub fn encode_query(cell: Cell, chn: u16, ts: EpochDay, params: &[TxParam]) -> Vec<u8> {
    let mut out = Vec::with_capacity(entry_len(params.len()));
    encode_query_into(cell, chn, ts, params, &mut out);
    out
}

/// Encodes entry `x_j` for an available row into `out`.
pub fn encode_entry_into(row: &RowRef<'_>, out: &mut Vec<u8>) -> Result<(), DbError> {
    if !row.avl {
        return Err(DbError::UnavailableRow);
    }
    let params = row.values.iter().enumerate().map(|(i, &value)| TxParam {
        param_id: i as u8,
        value,
    });
    write_tuple(out, row.cell(), row.chn, row.ts, row.values.len(), params);
    Ok(())
}

/// Encodes an owned row after checking it against the grid.
pub fn encode_entry(row: &DbRow, grid: &GridSpec) -> Result<Vec<u8>, DbError> {
    if !row.avl {
        return Err(DbError::UnavailableRow);
    }
    if row.lx >= grid.side || row.ly >= grid.side {
        return Err(DbError::invalid(
            "cell",
            format!("({}, {})", row.lx, row.ly),
        ));
    }
    if row.chn >= grid.n_ch {
        return Err(DbError::invalid("chn", row.chn));
    }
    if row.params.len() > u8::MAX as usize {
        return Err(DbError::invalid("param count", row.params.len()));
    }
    Ok(encode_query(
        Cell {
            lx: row.lx,
            ly: row.ly,
        },
        row.chn,
        row.ts,
        &row.params,
    ))
}

pub fn decode_entry(bytes: &[u8]) -> Result<DbRow, DbError> {
    if bytes.len() < ENTRY_FIXED_BYTES {
        return Err(DbError::MalformedEntry(format!("{} bytes", bytes.len())));
    }
    let count = bytes[18] as usize;
    if bytes.len() != entry_len(count) {
        return Err(DbError::MalformedEntry(format!(
            "{} bytes for {count} params, expected {}",
            bytes.len(),
            entry_len(count)
        )));
    }
    let params = bytes[ENTRY_FIXED_BYTES..]
        .chunks_exact(PARAM_BYTES)
        .map(|c| TxParam {
            param_id: c[0],
            value: u32::from_le_bytes(c[1..5].try_into().unwrap()),
        })
        .collect();
    Ok(DbRow {
        lx: u32::from_le_bytes(bytes[0..4].try_into().unwrap()),
        ly: u32::from_le_bytes(bytes[4..8].try_into().unwrap()),
        chn: u16::from_le_bytes(bytes[8..10].try_into().unwrap()),
        ts: EpochDay(u64::from_le_bytes(bytes[10..18].try_into().unwrap())),
        avl: true,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{ParamDomain, SpectrumDb};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn row(lx: u32, ly: u32, chn: u16, ts: u64, value: u32) -> DbRow {
        DbRow {
            lx,
            ly,
            ts: EpochDay(ts),
            chn,
            avl: true,
            params: vec![TxParam { param_id: 0, value }],
        }
    }

    #[test]
    fn single_param_entry_is_24_bytes() {
        let g = GridSpec::new(4, 2).unwrap();
        assert_eq!(encode_entry(&row(1, 2, 1, 19000, 2), &g).unwrap().len(), 24);
        assert_eq!(entry_len(1), 24);
    }

    #[test]
    fn exact_layout() {
        let g = GridSpec {
            side: u32::MAX,
            n_ch: u16::MAX,
        };
        let bytes = encode_entry(&row(0x0102_0304, 7, 0x0a0b, 0x1122, 2), &g).unwrap();
        assert_eq!(
            bytes,
            vec![
                0x04, 0x03, 0x02, 0x01, // lx
                7, 0, 0, 0, // ly
                0x0b, 0x0a, // chn
                0x22, 0x11, 0, 0, 0, 0, 0, 0, // ts
                1, // param_count
                0, 2, 0, 0, 0, // param 0 = 2
            ]
        );
    }

    #[test]
    fn unavailable_and_out_of_grid_rows_are_refused() {
        let g = GridSpec::new(4, 2).unwrap();
        let mut r = row(1, 1, 1, 0, 0);
        r.avl = false;
        assert!(matches!(encode_entry(&r, &g), Err(DbError::UnavailableRow)));
        assert!(encode_entry(&row(4, 0, 0, 0, 0), &g).is_err());
        assert!(encode_entry(&row(0, 0, 2, 0, 0), &g).is_err());
    }

    #[test]
    fn channel_and_day_change_the_bytes() {
        let g = GridSpec::new(4, 2).unwrap();
        assert_ne!(
            encode_entry(&row(1, 1, 0, 5, 0), &g).unwrap(),
            encode_entry(&row(1, 1, 1, 5, 0), &g).unwrap()
        );
        let p = [TxParam {
            param_id: 0,
            value: 0,
        }];
        assert_ne!(
            encode_query(Cell { lx: 1, ly: 1 }, 0, EpochDay(5), &p),
            encode_query(Cell { lx: 1, ly: 1 }, 0, EpochDay(6), &p)
        );
    }

    #[test]
    fn injective_on_small_domain() {
        // 4×4 grid, 2 channels, 1 day, 3 parameter values
        let g = GridSpec::new(4, 2).unwrap();
        let mut seen = HashSet::new();
        let mut n = 0;
        for lx in 0..4 {
            for ly in 0..4 {
                for chn in 0..2 {
                    for v in 0..3 {
                        assert!(
                            seen.insert(encode_entry(&row(lx, ly, chn, 20_000, v), &g).unwrap())
                        );
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(n, 96);
    }

    #[test]
    fn query_of_row_tuple_equals_entry() {
        let g = GridSpec::new(16, 31).unwrap();
        let db = SpectrumDb::generate(g, ParamDomain::default(), 0.3, EpochDay(20_000), 4).unwrap();
        let mut buf = Vec::new();
        for r in db.rows().filter(|r| r.avl) {
            encode_entry_into(&r, &mut buf).unwrap();
            assert_eq!(buf, encode_query(r.cell(), r.chn, r.ts, &r.params()));
            assert_eq!(buf, encode_entry(&r.to_owned(), &g).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn decode_inverts_encode(lx in any::<u32>(), ly in any::<u32>(), chn in any::<u16>(), ts in any::<u64>(),
                                 values in proptest::collection::vec(any::<u32>(), 0..4)) {
            let params: Vec<TxParam> = values.iter().enumerate()
                .map(|(i, &value)| TxParam { param_id: i as u8, value }).collect();
            let r = DbRow { lx, ly, ts: EpochDay(ts), chn, avl: true, params };
            let g = GridSpec { side: u32::MAX, n_ch: u16::MAX };
            prop_assume!(lx < g.side && ly < g.side && chn < g.n_ch);
            let bytes = encode_entry(&r, &g).unwrap();
            prop_assert_eq!(bytes.len(), entry_len(r.params.len()));
            prop_assert_eq!(decode_entry(&bytes).unwrap(), r);
        }
    }
}
