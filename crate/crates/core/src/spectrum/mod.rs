//! Grid-indexed spectrum database: ground truth, retrieval by device
//! characteristics, and the canonical byte encodings of entries and queries.

mod csv_io;
mod encoding;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use csv_io::{read_csv, write_csv};
pub use encoding::{
    decode_entry, encode_entry, encode_entry_into, encode_query, encode_query_into, entry_len,
    ENTRY_FIXED_BYTES,
};

#[derive(Debug, Error)]
pub enum DbError {
    #[error("{name} out of range: {value}")]
    InvalidRange { name: &'static str, value: String },
    #[error("only available rows are encoded")]
    UnavailableRow,
    #[error("malformed entry encoding: {0}")]
    MalformedEntry(String),
    #[error("ground truth csv: {0}")]
    Csv(String),
}

impl DbError {
    fn invalid(name: &'static str, value: impl std::fmt::Display) -> Self {
        DbError::InvalidRange {
            name,
            value: value.to_string(),
        }
    }
}

/// Day number since the Unix epoch. Availability is fixed per day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EpochDay(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub side: u32,
    pub n_ch: u16,
}

impl GridSpec {
    pub fn new(side: u32, n_ch: u16) -> Result<Self, DbError> {
        if side == 0 {
            return Err(DbError::invalid("side", side));
        }
        if n_ch == 0 {
            return Err(DbError::invalid("n_ch", n_ch));
        }
        Ok(GridSpec { side, n_ch })
    }

    /// Number of cells, `side²`.
    pub fn m(&self) -> u64 {
        self.side as u64 * self.side as u64
    }

    pub fn row_count(&self) -> u64 {
        self.m() * self.n_ch as u64
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.lx < self.side && cell.ly < self.side
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.side).flat_map(move |lx| (0..self.side).map(move |ly| Cell { lx, ly }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub lx: u32,
    pub ly: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TxParam {
    pub param_id: u8,
    pub value: u32,
}

/// One transmission parameter and its finite set of values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub values: Vec<String>,
}

/// The enumerated transmission-parameter domain shared by DB and SUs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDomain {
    params: Vec<ParamSpec>,
}

impl Default for ParamDomain {
    /// A single parameter: maximum EIRP in {40 mW, 100 mW, 4 W}.
    fn default() -> Self {
        ParamDomain {
            params: vec![ParamSpec {
                name: "max_eirp".into(),
                values: vec!["40mW".into(), "100mW".into(), "4W".into()],
            }],
        }
    }
}

impl ParamDomain {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self, DbError> {
        if params.len() > u8::MAX as usize {
            return Err(DbError::invalid("param count", params.len()));
        }
        if let Some(p) = params.iter().find(|p| p.values.is_empty()) {
            return Err(DbError::invalid("param cardinality", &p.name));
        }
        Ok(ParamDomain { params })
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Number of distinct parameter tuples.
    pub fn combination_count(&self) -> u64 {
        self.params.iter().map(|p| p.values.len() as u64).product()
    }

    /// Every parameter tuple, lexicographic with the first parameter most
    /// significant and values in declared order.
    pub fn combinations(&self) -> Vec<Vec<TxParam>> {
        let mut out: Vec<Vec<TxParam>> = vec![Vec::new()];
        for (id, spec) in self.params.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..spec.values.len() as u32).map(move |value| {
                        let mut next = prefix.clone();
                        next.push(TxParam {
                            param_id: id as u8,
                            value,
                        });
                        next
                    })
                })
                .collect();
        }
        out
    }

    /// Checks that `params` is one full tuple of this domain.
    pub fn check_params(&self, params: &[TxParam]) -> Result<(), DbError> {
        if params.len() != self.params.len() {
            return Err(DbError::invalid("param count", params.len()));
        }
        for (i, p) in params.iter().enumerate() {
            if p.param_id as usize != i || p.value as usize >= self.params[i].values.len() {
                return Err(DbError::invalid(
                    "param",
                    format!("{}={}", p.param_id, p.value),
                ));
            }
        }
        Ok(())
    }
}

/// Ordered parameter tuples an SU tries for each channel.
pub fn enumerate_param_combinations(domain: &ParamDomain) -> Vec<Vec<TxParam>> {
    domain.combinations()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum DeviceType {
    Fixed = 0,
    ModeI = 1,
    ModeII = 2,
}

impl DeviceType {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(DeviceType::Fixed),
            1 => Some(DeviceType::ModeI),
            2 => Some(DeviceType::ModeII),
            _ => None,
        }
    }
}

/// What an SU discloses about its device. Rows are selected by channel range only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeviceCharacteristics {
    pub device_type: DeviceType,
    pub antenna_height_m: u16,
    pub low_channel: u16,
    pub high_channel: u16,
}

impl DeviceCharacteristics {
    pub fn new(
        device_type: DeviceType,
        antenna_height_m: u16,
        low: u16,
        high: u16,
    ) -> Result<Self, DbError> {
        if low > high {
            return Err(DbError::invalid("freq_range", format!("{low}..={high}")));
        }
        Ok(DeviceCharacteristics {
            device_type,
            antenna_height_m,
            low_channel: low,
            high_channel: high,
        })
    }

    /// Portable device able to use every channel of the grid.
    pub fn full_range(grid: &GridSpec) -> Self {
        DeviceCharacteristics {
            device_type: DeviceType::ModeII,
            antenna_height_m: 2,
            low_channel: 0,
            high_channel: grid.n_ch - 1,
        }
    }

    pub fn channels(&self) -> std::ops::RangeInclusive<u16> {
        self.low_channel..=self.high_channel
    }

    pub fn channel_count(&self) -> u16 {
        self.high_channel - self.low_channel + 1
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<(), DbError> {
        if self.low_channel > self.high_channel || self.high_channel >= grid.n_ch {
            return Err(DbError::invalid(
                "freq_range",
                format!(
                    "{}..={} with n_ch={}",
                    self.low_channel, self.high_channel, grid.n_ch
                ),
            ));
        }
        Ok(())
    }
}

/// An owned database row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DbRow {
    pub lx: u32,
    pub ly: u32,
    pub ts: EpochDay,
    pub chn: u16,
    pub avl: bool,
    pub params: Vec<TxParam>,
}

/// Borrowed view of one row; parameter ids are the slice positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowRef<'a> {
    pub lx: u32,
    pub ly: u32,
    pub ts: EpochDay,
    pub chn: u16,
    pub avl: bool,
    pub values: &'a [u32],
}

impl RowRef<'_> {
    pub fn cell(&self) -> Cell {
        Cell {
            lx: self.lx,
            ly: self.ly,
        }
    }

    pub fn params(&self) -> Vec<TxParam> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &value)| TxParam {
                param_id: i as u8,
                value,
            })
            .collect()
    }

    pub fn to_owned(&self) -> DbRow {
        DbRow {
            lx: self.lx,
            ly: self.ly,
            ts: self.ts,
            chn: self.chn,
            avl: self.avl,
            params: self.params(),
        }
    }
}

/// Dense ground-truth table over every (cell, channel) for one day.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDb {
    grid: GridSpec,
    day: EpochDay,
    domain: ParamDomain,
    rho_target: f64,
    avl: Vec<bool>,
    values: Vec<u32>,
}

impl SpectrumDb {
    /// Each (cell, channel) is available independently with probability
    /// `rho`; available rows draw each parameter uniformly from its domain.
    pub fn generate(
        grid: GridSpec,
        domain: ParamDomain,
        rho: f64,
        day: EpochDay,
        seed: u64,
    ) -> Result<Self, DbError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(DbError::invalid("rho", rho));
        }
        let rows = grid.row_count() as usize;
        let width = domain.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut avl = Vec::with_capacity(rows);
        let mut values = vec![0u32; rows * width];
        for r in 0..rows {
            let available = rng.gen_bool(rho);
            avl.push(available);
            if available {
                for (k, spec) in domain.params().iter().enumerate() {
                    values[r * width + k] = rng.gen_range(0..spec.values.len() as u32);
                }
            }
        }
        Ok(SpectrumDb {
            grid,
            day,
            domain,
            rho_target: rho,
            avl,
            values,
        })
    }

    pub(crate) fn from_parts(
        grid: GridSpec,
        day: EpochDay,
        domain: ParamDomain,
        avl: Vec<bool>,
        values: Vec<u32>,
    ) -> Self {
        let mut db = SpectrumDb {
            grid,
            day,
            domain,
            rho_target: 0.0,
            avl,
            values,
        };
        db.rho_target = db.realized_rho();
        db
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn day(&self) -> EpochDay {
        self.day
    }

    pub fn domain(&self) -> &ParamDomain {
        &self.domain
    }

    pub fn rho_target(&self) -> f64 {
        self.rho_target
    }

    pub fn available_count(&self) -> u64 {
        self.avl.iter().filter(|&&a| a).count() as u64
    }

    pub fn realized_rho(&self) -> f64 {
        self.available_count() as f64 / self.avl.len() as f64
    }

    fn row_index(&self, cell: Cell, chn: u16) -> usize {
        (cell.lx as usize * self.grid.side as usize + cell.ly as usize) * self.grid.n_ch as usize
            + chn as usize
    }

    pub fn row(&self, cell: Cell, chn: u16) -> RowRef<'_> {
        let r = self.row_index(cell, chn);
        let w = self.domain.len();
        RowRef {
            lx: cell.lx,
            ly: cell.ly,
            ts: self.day,
            chn,
            avl: self.avl[r],
            values: &self.values[r * w..(r + 1) * w],
        }
    }

    pub fn is_available(&self, cell: Cell, chn: u16) -> bool {
        self.avl[self.row_index(cell, chn)]
    }

    /// All rows in (lx, ly, chn) order.
    pub fn rows(&self) -> impl Iterator<Item = RowRef<'_>> + '_ {
        self.grid
            .cells()
            .flat_map(move |cell| (0..self.grid.n_ch).map(move |chn| self.row(cell, chn)))
    }

    /// Rows whose channel lies in the device's range, across every cell.
    pub fn retrieve(&self, chr: &DeviceCharacteristics) -> Retrieval<'_> {
        Retrieval {
            db: self,
            chr: *chr,
            axis: None,
        }
    }

    /// As [`retrieve`](Self::retrieve), restricted to the cells on one grid line.
    pub fn retrieve_on_line(
        &self,
        chr: &DeviceCharacteristics,
        axis: Axis,
        coordinate: u32,
    ) -> Retrieval<'_> {
        Retrieval {
            db: self,
            chr: *chr,
            axis: Some((axis, coordinate)),
        }
    }

    /// First available channel in the device range at `cell`, in ascending
    /// channel order, with that row's parameters.
    pub fn first_available(
        &self,
        cell: Cell,
        chr: &DeviceCharacteristics,
    ) -> Option<(u16, Vec<TxParam>)> {
        chr.channels()
            .find(|&c| self.is_available(cell, c))
            .map(|c| (c, self.row(cell, c).params()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// The response set `resp` for a characteristics query.
#[derive(Debug, Clone, Copy)]
pub struct Retrieval<'a> {
    db: &'a SpectrumDb,
    chr: DeviceCharacteristics,
    axis: Option<(Axis, u32)>,
}

impl<'a> Retrieval<'a> {
    /// `rw`, the number of rows satisfying the query.
    pub fn len(&self) -> u64 {
        let cells = match self.axis {
            None => self.db.grid.m(),
            Some((_, c)) if c < self.db.grid.side => self.db.grid.side as u64,
            Some(_) => 0,
        };
        cells * self.chr.channel_count() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cells(&self) -> Box<dyn Iterator<Item = Cell> + 'a> {
        let side = self.db.grid.side;
        match self.axis {
            None => Box::new(self.db.grid.cells()),
            Some((_, c)) if c >= side => Box::new(std::iter::empty()),
            Some((Axis::X, lx)) => Box::new((0..side).map(move |ly| Cell { lx, ly })),
            Some((Axis::Y, ly)) => Box::new((0..side).map(move |lx| Cell { lx, ly })),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = RowRef<'a>> + 'a {
        let db = self.db;
        let chr = self.chr;
        self.cells()
            .flat_map(move |cell| chr.channels().map(move |c| db.row(cell, c)))
    }

    pub fn available(&self) -> impl Iterator<Item = RowRef<'a>> + 'a {
        self.iter().filter(|r| r.avl)
    }
}
