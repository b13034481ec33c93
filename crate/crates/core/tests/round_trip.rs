mod common;

use common::scene_sets;
use navtransfer::eval::{load_episodes, save_episodes};
use navtransfer::navgraph::{load_graph, save_graph};
use navtransfer::subgoal::{generate_candidates, CandidateSource, ProposerMode, RadialMap, SubgoalConfig};
use navtransfer::world::{laser_scan, load_world, save_world};

#[test]
fn scene_files_round_trip_byte_identically() {
    for s in scene_sets(70..72, 8, 1, 6) {
        let text = save_world(&s.world);
        let back = load_world(text.as_bytes()).unwrap();
        assert_eq!(save_world(&back), text);
        assert_eq!(back.occupancy(), s.world.occupancy());
        assert_eq!(back.name(), s.world.name());
        for (a, b) in back.elevation().iter().zip(s.world.elevation()) {
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }

        let text = save_graph(&s.graph);
        let graph = load_graph(text.as_bytes()).unwrap();
        assert_eq!(graph, s.graph);
        assert_eq!(save_graph(&graph), text);

        let text = save_episodes(&s.episodes).unwrap();
        let episodes = load_episodes(&text).unwrap();
        assert_eq!(episodes, s.episodes);
        assert_eq!(save_episodes(&episodes).unwrap(), text);
    }
}

#[test]
fn radial_maps_round_trip() {
    for s in scene_sets(73..74, 8, 1, 4) {
        for e in &s.episodes {
            let scan = laser_scan(&s.world, &e.start);
            assert_eq!(RadialMap::from_json(&scan.to_json()).unwrap(), scan);
            let set = generate_candidates(
                CandidateSource::HeuristicSgm,
                &s.world,
                &s.graph,
                &e.start,
                ProposerMode::ElevAware,
                &SubgoalConfig::default(),
            )
            .unwrap();
            let heat = set.heatmap.unwrap();
            assert_eq!(RadialMap::from_json(&heat.to_json()).unwrap(), heat);
        }
    }
}
