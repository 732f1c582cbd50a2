// Every chapter of the guide is attached to an empty module so that
// `cargo test --doc -p extriloc-book` compiles and runs its listings.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/backends.md")]
pub mod backends {}
#[doc = include_str!("src/subcategories.md")]
pub mod subcategories {}
#[doc = include_str!("src/relative.md")]
pub mod relative {}
#[doc = include_str!("src/localization.md")]
pub mod localization {}
#[doc = include_str!("src/heart.md")]
pub mod heart {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
