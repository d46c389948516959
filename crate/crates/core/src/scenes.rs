//! Scene files shipped with the crate.

pub const WALL2D: &str = include_str!("../scenes/wall2d.toml");
pub const GAP2D: &str = include_str!("../scenes/gap2d.toml");
pub const ARM3_WALL: &str = include_str!("../scenes/arm3_wall.toml");

/// `(name, file contents)` for every bundled scene.
pub const BUNDLED: &[(&str, &str)] = &[
    ("wall2d", WALL2D),
    ("gap2d", GAP2D),
    ("arm3_wall", ARM3_WALL),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}
