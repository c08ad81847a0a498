use polyform::bars::{self, BarGraphStructure};
use polyform::codec::Container;
use polyform::grid::{self, Dir, Polyomino};
use polyform::query::Navigable;
use polyform::sliced::{SlicedStructure, Thickness};
use polyform::{CoveringStructure, LabeledBfsTree, Structure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reload(s: &Structure) -> Structure {
    let bytes = s.to_container().to_bytes();
    let mut r = Structure::from_container(&Container::from_bytes(&bytes).unwrap()).unwrap();
    if let Some(m) = s.handle_map() {
        r.set_handle_map(m);
    }
    assert_eq!(r.space_report(), s.space_report());
    r
}

fn same_answers(a: &dyn Navigable, b: &dyn Navigable, handles: &[usize]) {
    for &x in handles {
        for d in Dir::ALL {
            assert_eq!(a.neighbor(x, d), b.neighbor(x, d));
        }
        assert_eq!(a.degree(x), b.degree(x));
        for &y in handles {
            assert_eq!(a.is_visible(x, y), b.is_visible(x, y));
            assert_eq!(a.adjacent(x, y), b.adjacent(x, y));
        }
    }
}

fn cell_handles(s: &Structure) -> Vec<usize> {
    let m = s.handle_map().unwrap();
    let mut hs: Vec<usize> = (1..=m.len() * 2 + 2).filter(|&h| m.coord(h).is_some()).collect();
    hs.sort();
    hs
}

#[test]
fn container_round_trip_every_kind() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for _ in 0..100 {
        let p = grid::random_mixed(&mut rng, 90);
        let f = rng.gen_range(1..=p.height());
        for s in [
            Structure::Covering(CoveringStructure::build(&p)),
            Structure::Sliced(SlicedStructure::build(&p, Thickness::Fixed(f)).unwrap()),
        ] {
            let r = reload(&s);
            let hs = cell_handles(&s);
            match (&s, &r) {
                (Structure::Covering(a), Structure::Covering(b)) => same_answers(a, b, &hs),
                (Structure::Sliced(a), Structure::Sliced(b)) => same_answers(a, b, &hs),
                _ => panic!("kind changed on reload"),
            }
        }

        let n = rng.gen_range(1..120);
        let s = Structure::Bars(BarGraphStructure::build(&grid::random_composition(&mut rng, n)).unwrap());
        let Structure::Bars(b) = reload(&s) else { panic!() };
        let Structure::Bars(a) = &s else { unreachable!() };
        assert_eq!(a.composition(), b.composition());
        same_answers(a, &b, &(1..=n).collect::<Vec<_>>());

        let n = rng.gen_range(1..80);
        let p = grid::random_connected(&mut rng, n);
        let root = p.cells().nth(rng.gen_range(0..n)).unwrap();
        let s = Structure::Bfs(LabeledBfsTree::build(&p, root).unwrap());
        let Structure::Bfs(b) = reload(&s) else { panic!() };
        let Structure::Bfs(a) = &s else { unreachable!() };
        for x in 1..=n {
            assert_eq!(a.relative_position(x), b.relative_position(x));
            for y in 1..=n {
                assert_eq!(a.adjacent(x, y), b.adjacent(x, y));
            }
        }
    }
}

/// Bar-graph visibility from the definition: same bar always sees itself;
/// across bars, every bar in between must reach the row.
struct BarOracle {
    /// sparse table of range minima over bar sizes
    table: Vec<Vec<usize>>,
}

impl BarOracle {
    fn new(sizes: &[usize]) -> BarOracle {
        let mut table = vec![sizes.to_vec()];
        let mut w = 1;
        while 2 * w <= sizes.len() {
            let prev = table.last().unwrap();
            table.push((0..=sizes.len() - 2 * w).map(|i| prev[i].min(prev[i + w])).collect());
            w *= 2;
        }
        BarOracle { table }
    }

    fn min(&self, i: usize, j: usize) -> usize {
        let k = (j - i + 1).ilog2() as usize;
        self.table[k][i].min(self.table[k][j + 1 - (1 << k)])
    }

    /// (bar, height) pairs, 0-based
    fn visible(&self, (b1, h1): (usize, usize), (b2, h2): (usize, usize)) -> bool {
        if b1 == b2 {
            return true;
        }
        h1 == h2 && self.min(b1.min(b2), b1.max(b2)) > h1
    }
}

#[test]
fn bar_oracle_agrees_with_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let n = rng.gen_range(1..40);
        let comp = grid::random_composition(&mut rng, n);
        let p = Polyomino::from_composition(&comp).unwrap();
        let o = BarOracle::new(&comp);
        let cells: Vec<_> = p.cells().collect();
        for &a in &cells {
            for &b in &cells {
                let want = p.oracle_visible(a, b).unwrap();
                assert_eq!(o.visible((a.0 as usize, a.1 as usize), (b.0 as usize, b.1 as usize)), want);
            }
        }
    }
}

#[test]
fn bars_random_large() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for round in 0..200 {
        let n = rng.gen_range(1_000..=100_000);
        let comp = match round % 3 {
            0 => grid::random_composition(&mut rng, n),
            1 => grid::random_composition_with(&mut rng, n, 0.1),
            _ => grid::random_composition_with(&mut rng, n, 0.8),
        };
        let g = BarGraphStructure::build(&comp).unwrap();
        assert_eq!(g.k(), bars::natural_k(n));
        assert_eq!(g.s_bits().count_ones(), comp.len());
        assert_eq!(g.composition(), comp);
        let m = bars::handle_map(&comp);
        let o = BarOracle::new(&comp);
        let at = |x: usize| {
            let (b, h) = m.coord(x).unwrap();
            (b as usize, h as usize)
        };
        for t in 0..10_000 {
            let a = rng.gen_range(1..=n);
            let b = if t % 2 == 0 {
                rng.gen_range(1..=n)
            } else {
                // same-height partner, to exercise the cross-block path
                let (_, h) = at(a);
                let bar = rng.gen_range(0..comp.len());
                if comp[bar] > h {
                    m.handle((bar as i64, h as i64)).unwrap()
                } else {
                    rng.gen_range(1..=n)
                }
            };
            assert_eq!(g.is_visible(a, b), Ok(o.visible(at(a), at(b))), "n={n} a={a} b={b}");
        }
        for _ in 0..1_000 {
            let a = rng.gen_range(1..=n);
            let (bar, h) = at(a);
            let want = |c: Option<(usize, usize)>| c.map(|(b, h)| m.handle((b as i64, h as i64)).unwrap());
            let left = (bar > 0 && comp[bar - 1] > h).then(|| (bar - 1, h));
            let right = (bar + 1 < comp.len() && comp[bar + 1] > h).then(|| (bar + 1, h));
            assert_eq!(g.neighbor(a, Dir::Left), Ok(want(left)));
            assert_eq!(g.neighbor(a, Dir::Right), Ok(want(right)));
        }
    }
}
