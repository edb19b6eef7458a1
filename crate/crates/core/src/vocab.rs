//! Object attribute vocabularies and canonical object names.
//!
//! An object is named `"{texture} {color} {shape}"`, all lowercase with single
//! spaces. Several tokens contain spaces themselves ("vertical striped",
//! "light green", "upside down tee"), so parsing matches the longest texture
//! and color prefix and requires the remainder to be an exact shape.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::VocabError;

macro_rules! vocab_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            /// Longest token that prefixes `text` and is followed by a space.
            pub fn strip_prefix(text: &str) -> Option<($name, &str)> {
                let mut best: Option<($name, &str)> = None;
                for &item in Self::ALL {
                    let token = item.as_str();
                    if let Some(rest) = text.strip_prefix(token).and_then(|r| r.strip_prefix(' ')) {
                        if best.map_or(true, |(b, _)| b.as_str().len() < token.len()) {
                            best = Some((item, rest));
                        }
                    }
                }
                best
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = VocabError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::ALL
                    .iter()
                    .copied()
                    .find(|item| item.as_str() == s)
                    .ok_or_else(|| VocabError::UnknownToken(s.to_string()))
            }
        }
    };
}

vocab_enum! {
    /// Surface texture of an object.
    Texture {
        Solid => "solid",
        Noisy => "noisy",
        Checker => "checker",
        Grid => "grid",
        VerticalStriped => "vertical striped",
        HorizontalStriped => "horizontal striped",
    }
}

vocab_enum! {
    /// Object and agent colors.
    Color {
        DarkBlue => "dark blue",
        LightGreen => "light green",
        Brown => "brown",
        Orange => "orange",
        Blue => "blue",
        Lavender => "lavender",
        Green => "green",
        Pink => "pink",
        Teal => "teal",
        Purple => "purple",
        DarkRed => "dark red",
        Yellow => "yellow",
        Peach => "peach",
        LightYellow => "light yellow",
    }
}

vocab_enum! {
    /// Object shape.
    Shape {
        H => "h",
        Tee => "tee",
        Plus => "plus",
        InversePlus => "inverse plus",
        Circle => "circle",
        Ex => "ex",
        Triangle => "triangle",
        U => "u",
        UpsideDownU => "upside down u",
        UpsideDownTee => "upside down tee",
    }
}

/// Which half of the color vocabulary a color falls in. The visual color task
/// branches on this split, which divides the 14 colors 7/7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColorGroup {
    Warm,
    Cool,
}

impl ColorGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            ColorGroup::Warm => "warm",
            ColorGroup::Cool => "cool",
        }
    }
}

impl Color {
    pub fn group(self) -> ColorGroup {
        use Color::*;
        match self {
            Brown | Orange | Pink | DarkRed | Yellow | Peach | LightYellow => ColorGroup::Warm,
            DarkBlue | LightGreen | Blue | Lavender | Green | Teal | Purple => ColorGroup::Cool,
        }
    }

    pub fn index(self) -> usize {
        Color::ALL.iter().position(|&c| c == self).expect("color in vocabulary")
    }
}

/// The (texture, color, shape) triple identifying an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectAttributes {
    pub texture: Texture,
    pub color: Color,
    pub shape: Shape,
}

impl ObjectAttributes {
    pub fn new(texture: Texture, color: Color, shape: Shape) -> Self {
        Self { texture, color, shape }
    }

    /// Canonical object name, e.g. `"solid dark blue h"`.
    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Every triple in the vocabulary, in texture-major order.
    pub fn all() -> impl Iterator<Item = ObjectAttributes> {
        Texture::ALL.iter().flat_map(|&texture| {
            Color::ALL.iter().flat_map(move |&color| {
                Shape::ALL
                    .iter()
                    .map(move |&shape| ObjectAttributes::new(texture, color, shape))
            })
        })
    }
}

impl fmt::Display for ObjectAttributes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.texture, self.color, self.shape)
    }
}

impl FromStr for ObjectAttributes {
    type Err = VocabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VocabError::BadObjectName(s.to_string());
        let (texture, rest) = Texture::strip_prefix(s).ok_or_else(bad)?;
        let (color, rest) = Color::strip_prefix(rest).ok_or_else(bad)?;
        let shape = rest.parse::<Shape>().map_err(|_| bad())?;
        Ok(ObjectAttributes::new(texture, color, shape))
    }
}

/// Canonical name of an attribute triple.
pub fn object_name(attrs: &ObjectAttributes) -> String {
    attrs.name()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_match_prompt_corpus() {
        let a = ObjectAttributes::new(Texture::Solid, Color::DarkBlue, Shape::H);
        assert_eq!(object_name(&a), "solid dark blue h");
        let b = ObjectAttributes::new(Texture::VerticalStriped, Color::Orange, Shape::Ex);
        assert_eq!(object_name(&b), "vertical striped orange ex");
    }

    #[test]
    fn every_triple_round_trips() {
        let mut count = 0;
        for attrs in ObjectAttributes::all() {
            let name = attrs.name();
            assert_eq!(name.parse::<ObjectAttributes>().unwrap(), attrs, "{name}");
            assert_eq!(name, name.to_lowercase());
            assert!(!name.contains("  "));
            count += 1;
        }
        assert_eq!(count, 6 * 14 * 10);
    }

    #[test]
    fn longest_color_prefix_wins() {
        let a: ObjectAttributes = "horizontal striped light green inverse plus".parse().unwrap();
        assert_eq!(a.color, Color::LightGreen);
        assert_eq!(a.shape, Shape::InversePlus);
        let b: ObjectAttributes = "solid light yellow upside down u".parse().unwrap();
        assert_eq!(b.color, Color::LightYellow);
        assert_eq!(b.shape, Shape::UpsideDownU);
    }

    #[test]
    fn rejects_unknown_names() {
        assert!("shiny red ball".parse::<ObjectAttributes>().is_err());
        assert!("solid dark blue".parse::<ObjectAttributes>().is_err());
        assert!("solid dark blue h extra".parse::<ObjectAttributes>().is_err());
    }

    #[test]
    fn color_split_is_balanced() {
        let warm = Color::ALL.iter().filter(|c| c.group() == ColorGroup::Warm).count();
        assert_eq!(warm, 7);
        assert_eq!(Color::ALL.len() - warm, 7);
    }
}
