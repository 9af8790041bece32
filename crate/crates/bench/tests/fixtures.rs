use doshap_bench::{braid, chain, confounded_braid, linear_game, star};
use doshap_core::all_classes;

#[test]
fn fixtures_build_and_keep_every_player() {
    for d in [1, 2, 5, 16] {
        for g in [chain(d), star(d), braid(d)] {
            assert_eq!(g.num_players(), d);
            assert!(g.pruned().is_empty());
            linear_game(&g);
        }
        assert_eq!(confounded_braid(d).graph().num_players(), d);
    }
}

#[test]
fn braid_sits_between_chain_and_star() {
    let r = all_classes(&braid(10)).r();
    assert!(r > 11 && r < 1 << 10, "r = {r}");
}
