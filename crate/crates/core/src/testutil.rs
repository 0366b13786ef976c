//! The four-session web log as a binary matrix, shared by unit tests.

use crate::store::{BinaryTransactionDB, Bitmap, ItemId, ItemLayout};

/// Items: USA China Germany | Male Female | IE Netscape Mozilla.
pub fn sessions_layout() -> ItemLayout {
    ItemLayout {
        item_attribute: vec![0, 0, 0, 1, 1, 2, 2, 2],
        attribute_items: vec![
            vec![ItemId(0), ItemId(1), ItemId(2)],
            vec![ItemId(3), ItemId(4)],
            vec![ItemId(5), ItemId(6), ItemId(7)],
        ],
        interval: vec![false; 3],
    }
}

pub fn sessions_db() -> BinaryTransactionDB {
    let rows = [[0usize, 3, 5], [1, 4, 6], [0, 4, 7], [2, 3, 5]];
    let mut columns = vec![Bitmap::new(4); 8];
    for (r, t) in rows.iter().enumerate() {
        for &i in t {
            columns[i].set(r);
        }
    }
    BinaryTransactionDB::new(4, columns, sessions_layout()).unwrap()
}
