//! Structure-of-arrays storage for user-declared neuron and synapse fields.
//!
//! A model declares its per-neuron (or per-synapse) state as a tuple such as
//! `(f32, f32, i32)`. [`Soa`] stores one array per tuple element and hands out
//! lightweight [`Record`] handles that address a single row. Field access is
//! positional, `record.get::<0>()`, mirroring a `neuron_desc<...>` layout.
//!
//! Cells are atomics so that records may be shared between worker threads
//! inside a stage. Plain reads and writes use relaxed ordering and compile
//! to ordinary moves; stages are separated by full barriers. Concurrent
//! deliveries to one neuron must go through [`Record::add`].

use std::fmt::Debug;
use std::sync::atomic::{AtomicBool, AtomicI32, AtomicU32, AtomicU64, Ordering::Relaxed};

/// A scalar that can live in a structure-of-arrays column.
pub trait Field: Copy + Default + PartialEq + Debug + Send + Sync + 'static {
    type Cell: Send + Sync;

    fn cell(value: Self) -> Self::Cell;
    fn load(cell: &Self::Cell) -> Self;
    fn store(cell: &Self::Cell, value: Self);
}

/// Read-modify-write accumulation into a cell.
///
/// With `shared == false` the caller guarantees exclusive access to the cell
/// for the duration of the call and a plain load/store is used.
pub trait Accumulate: Field + std::ops::Add<Output = Self> {
    fn accumulate(cell: &Self::Cell, value: Self, shared: bool);
}

macro_rules! float_field {
    ($t:ty, $atomic:ty) => {
        impl Field for $t {
            type Cell = $atomic;

            #[inline]
            fn cell(value: Self) -> $atomic {
                <$atomic>::new(value.to_bits())
            }
            #[inline]
            fn load(cell: &$atomic) -> Self {
                <$t>::from_bits(cell.load(Relaxed))
            }
            #[inline]
            fn store(cell: &$atomic, value: Self) {
                cell.store(value.to_bits(), Relaxed)
            }
        }

        impl Accumulate for $t {
            #[inline]
            fn accumulate(cell: &$atomic, value: Self, shared: bool) {
                if shared {
                    let _ = cell.fetch_update(Relaxed, Relaxed, |bits| {
                        Some((<$t>::from_bits(bits) + value).to_bits())
                    });
                } else {
                    Self::store(cell, Self::load(cell) + value);
                }
            }
        }
    };
}

macro_rules! int_field {
    ($t:ty, $atomic:ty) => {
        impl Field for $t {
            type Cell = $atomic;

            #[inline]
            fn cell(value: Self) -> $atomic {
                <$atomic>::new(value)
            }
            #[inline]
            fn load(cell: &$atomic) -> Self {
                cell.load(Relaxed)
            }
            #[inline]
            fn store(cell: &$atomic, value: Self) {
                cell.store(value, Relaxed)
            }
        }

        impl Accumulate for $t {
            #[inline]
            fn accumulate(cell: &$atomic, value: Self, shared: bool) {
                if shared {
                    cell.fetch_add(value, Relaxed);
                } else {
                    cell.store(cell.load(Relaxed).wrapping_add(value), Relaxed);
                }
            }
        }
    };
}

float_field!(f32, AtomicU32);
float_field!(f64, AtomicU64);
int_field!(u32, AtomicU32);
int_field!(i32, AtomicI32);
int_field!(u64, AtomicU64);

impl Field for bool {
    type Cell = AtomicBool;

    #[inline]
    fn cell(value: Self) -> AtomicBool {
        AtomicBool::new(value)
    }
    #[inline]
    fn load(cell: &AtomicBool) -> Self {
        cell.load(Relaxed)
    }
    #[inline]
    fn store(cell: &AtomicBool, value: Self) {
        cell.store(value, Relaxed)
    }
}

/// A record type stored column-wise. Implemented for `()` and for tuples of
/// up to six [`Field`]s.
pub trait Layout: Copy + Default + Debug + Send + Sync + 'static {
    type Columns: Send + Sync;

    /// Number of fields.
    const FIELDS: usize;
    /// Payload bytes per record.
    const BYTES: usize;

    fn columns(len: usize) -> Self::Columns;
    fn load(columns: &Self::Columns, index: usize) -> Self;
    fn store(columns: &Self::Columns, index: usize, value: Self);
}

/// Positional access to field `I` of a layout.
pub trait Column<const I: usize>: Layout {
    type Value: Field;

    fn cells(columns: &Self::Columns) -> &[<Self::Value as Field>::Cell];
    fn field(&self) -> &Self::Value;
    fn field_mut(&mut self) -> &mut Self::Value;
}

impl Layout for () {
    type Columns = ();
    const FIELDS: usize = 0;
    const BYTES: usize = 0;

    fn columns(_: usize) {}
    fn load(_: &(), _: usize) {}
    fn store(_: &(), _: usize, _: ()) {}
}

fn column<F: Field>(len: usize) -> Vec<F::Cell> {
    (0..len).map(|_| F::cell(F::default())).collect()
}

macro_rules! tuple_layout {
    ($count:expr; $($T:ident $i:tt),+) => {
        impl<$($T: Field),+> Layout for ($($T,)+) {
            type Columns = ($(Vec<$T::Cell>,)+);
            const FIELDS: usize = $count;
            const BYTES: usize = 0 $(+ std::mem::size_of::<$T>())+;

            fn columns(len: usize) -> Self::Columns {
                ($(column::<$T>(len),)+)
            }
            #[inline]
            fn load(columns: &Self::Columns, index: usize) -> Self {
                ($($T::load(&columns.$i[index]),)+)
            }
            #[inline]
            fn store(columns: &Self::Columns, index: usize, value: Self) {
                $($T::store(&columns.$i[index], value.$i);)+
            }
        }
    };
}

macro_rules! tuple_column {
    ($i:tt => $V:ident; $($T:ident),+) => {
        impl<$($T: Field),+> Column<$i> for ($($T,)+) {
            type Value = $V;

            #[inline]
            fn cells(columns: &Self::Columns) -> &[<$V as Field>::Cell] {
                &columns.$i
            }
            #[inline]
            fn field(&self) -> &$V {
                &self.$i
            }
            #[inline]
            fn field_mut(&mut self) -> &mut $V {
                &mut self.$i
            }
        }
    };
}

tuple_layout!(1; A 0);
tuple_layout!(2; A 0, B 1);
tuple_layout!(3; A 0, B 1, C 2);
tuple_layout!(4; A 0, B 1, C 2, D 3);
tuple_layout!(5; A 0, B 1, C 2, D 3, E 4);
tuple_layout!(6; A 0, B 1, C 2, D 3, E 4, F 5);

tuple_column!(0 => A; A);
tuple_column!(0 => A; A, B);
tuple_column!(1 => B; A, B);
tuple_column!(0 => A; A, B, C);
tuple_column!(1 => B; A, B, C);
tuple_column!(2 => C; A, B, C);
tuple_column!(0 => A; A, B, C, D);
tuple_column!(1 => B; A, B, C, D);
tuple_column!(2 => C; A, B, C, D);
tuple_column!(3 => D; A, B, C, D);
tuple_column!(0 => A; A, B, C, D, E);
tuple_column!(1 => B; A, B, C, D, E);
tuple_column!(2 => C; A, B, C, D, E);
tuple_column!(3 => D; A, B, C, D, E);
tuple_column!(4 => E; A, B, C, D, E);
tuple_column!(0 => A; A, B, C, D, E, F);
tuple_column!(1 => B; A, B, C, D, E, F);
tuple_column!(2 => C; A, B, C, D, E, F);
tuple_column!(3 => D; A, B, C, D, E, F);
tuple_column!(4 => E; A, B, C, D, E, F);
tuple_column!(5 => F; A, B, C, D, E, F);

/// Column-wise storage of `len` records.
pub struct Soa<L: Layout> {
    columns: L::Columns,
    len: usize,
}

impl<L: Layout> Soa<L> {
    pub fn new(len: usize) -> Self {
        Soa {
            columns: L::columns(len),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Handle to record `index`. `shared` selects atomic accumulation.
    #[inline]
    pub fn record(&self, index: usize, shared: bool) -> Record<'_, L> {
        debug_assert!(index < self.len);
        Record {
            columns: &self.columns,
            index,
            shared,
        }
    }

    #[inline]
    pub fn load(&self, index: usize) -> L {
        L::load(&self.columns, index)
    }

    #[inline]
    pub fn store(&self, index: usize, value: L) {
        L::store(&self.columns, index, value)
    }

    /// Resets every record to `L::default()`.
    pub fn clear(&self) {
        for i in 0..self.len {
            L::store(&self.columns, i, L::default());
        }
    }

    /// Copies all records out.
    pub fn snapshot(&self) -> Vec<L> {
        (0..self.len).map(|i| self.load(i)).collect()
    }

    /// Values of field `I` for every record.
    pub fn column<const I: usize>(&self) -> Vec<<L as Column<I>>::Value>
    where
        L: Column<I>,
    {
        L::cells(&self.columns)
            .iter()
            .map(<L as Column<I>>::Value::load)
            .collect()
    }

    /// Bytes allocated for the payload.
    pub fn bytes(&self) -> usize {
        self.len * L::BYTES
    }
}

/// Handle to one record inside a [`Soa`].
pub struct Record<'a, L: Layout> {
    columns: &'a L::Columns,
    index: usize,
    shared: bool,
}

impl<L: Layout> Clone for Record<'_, L> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<L: Layout> Copy for Record<'_, L> {}

impl<'a, L: Layout> Record<'a, L> {
    /// Row index. For neurons this is the global neuron id.
    #[inline]
    pub fn id(&self) -> u32 {
        self.index as u32
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index
    }

    #[inline]
    pub fn get<const I: usize>(&self) -> <L as Column<I>>::Value
    where
        L: Column<I>,
    {
        <L as Column<I>>::Value::load(&L::cells(self.columns)[self.index])
    }

    #[inline]
    pub fn set<const I: usize>(&self, value: <L as Column<I>>::Value)
    where
        L: Column<I>,
    {
        <L as Column<I>>::Value::store(&L::cells(self.columns)[self.index], value)
    }

    /// Adds `value` to field `I`. Safe under concurrent delivery to the same
    /// record.
    #[inline]
    pub fn add<const I: usize>(&self, value: <L as Column<I>>::Value)
    where
        L: Column<I>,
        <L as Column<I>>::Value: Accumulate,
    {
        <L as Column<I>>::Value::accumulate(&L::cells(self.columns)[self.index], value, self.shared)
    }

    #[inline]
    pub fn load(&self) -> L {
        L::load(self.columns, self.index)
    }

    #[inline]
    pub fn store(&self, value: L) {
        L::store(self.columns, self.index, value)
    }
}
