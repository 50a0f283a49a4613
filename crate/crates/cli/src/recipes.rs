//! Built-in scenarios, stored as ordinary config files.

pub struct Recipe {
    pub name: &'static str,
    pub about: &'static str,
    pub config: &'static str,
}

macro_rules! recipe {
    ($name:literal, $about:literal) => {
        Recipe {
            name: $name,
            about: $about,
            config: include_str!(concat!("../recipes/", $name, ".toml")),
        }
    };
}

pub const RECIPES: &[Recipe] = &[
    recipe!(
        "appendix-b1",
        "symmetric 4-agent complete network: individual vs planner precision"
    ),
    recipe!(
        "appendix-b2",
        "7-agent core-periphery network: influence and precision"
    ),
    recipe!(
        "figure-6-uneven",
        "complete network with uneven self-weights"
    ),
    recipe!(
        "appendix-b3-spec-gen",
        "specialist share sweep with Monte Carlo check"
    ),
    recipe!(
        "appendix-b4-two-period",
        "two-period kernel dynamics with tie injection"
    ),
    recipe!(
        "multiplex-3layer",
        "dimension choice across complete, core-periphery and star layers"
    ),
    recipe!(
        "appendix-b4-statics",
        "kernel network of (1,2,2,3) and each agent's best response"
    ),
    recipe!(
        "figure-5",
        "two-period kernel dynamics ending in uniform influence"
    ),
    recipe!(
        "kernel-memory",
        "random start, discounted memories, posterior beliefs"
    ),
];

pub fn find(name: &str) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name)
}
