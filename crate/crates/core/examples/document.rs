// Save a tree as canonical JSON and load it back bit for bit.

use nestpack::document::{load_tree, save_tree, TreeDocument};
use nestpack::geometry::{Point, Region};
use nestpack::hierarchy::{build_hierarchy_in, LevelSpec};

fn main() {
    let root = Region::Disc { center: Point::new(0.5, 0.5), radius: 2.0 };
    let tree = build_hierarchy_in(root, &LevelSpec::new(vec![20, 4]).unwrap(), 10_000).unwrap();

    let mut bytes = Vec::new();
    save_tree(&tree, &mut bytes).unwrap();
    let back = load_tree(bytes.as_slice()).unwrap();
    println!("{} bytes, round trip exact: {}", bytes.len(), back == tree);

    let doc = TreeDocument::from_tree(&tree);
    let r = &doc.levels[1][0];
    println!("first level-2 record: parent {:?}, r = {}, local r = {}", r.parent_index, r.r, r.lr);
}
