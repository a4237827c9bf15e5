use phongfield::baker::{
    bake_all, bake_all_with_threads, bake_specular, load_bundle, save_bundle, Lobe,
};
use phongfield::envmap::{load_hdr, sun_and_sky, write_hdr, write_pfm, y_quarter_rotation};
use phongfield::{Direction, EnvironmentMap, Error, LatLongMap, Rgb, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn thread_count_does_not_change_bits() {
    let env = sun_and_sky(64, 32).unwrap();
    let one = bake_all_with_threads(&env, &[1, 16, 64], (32, 16), Some(1)).unwrap();
    let many = bake_all_with_threads(&env, &[1, 16, 64], (32, 16), Some(4)).unwrap();
    assert_eq!(one, many);
}

#[test]
fn rotated_environment_rotates_lookups() {
    let env = sun_and_sky(64, 32).unwrap();
    let set = [1, 16, 32, 64];
    let base = bake_all(&env, &set, (64, 32)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 1..4 {
        let turned = bake_all(&env.rotate_y_quarter(k).unwrap(), &set, (64, 32)).unwrap();
        let r = y_quarter_rotation(k);
        let mut err = 0.0;
        let count = 500;
        for _ in 0..count {
            let d = Direction::normalize(Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ))
            .unwrap();
            let back = Direction::normalize(r.transpose() * d.as_vec()).unwrap();
            for lobe in [Lobe::Diffuse, Lobe::Specular(64)] {
                let a = turned.sample(lobe, d).unwrap();
                let b = base.sample(lobe, back).unwrap();
                err += (a - b).to_array().iter().map(|x| x.abs()).sum::<f64>()
                    / b.to_array().iter().sum::<f64>();
            }
        }
        let mean = err / (2 * count) as f64;
        assert!(mean < 0.02, "quarter turns {k}: mean rel err {mean}");
    }
}

#[test]
fn lobe_narrows_with_shininess() {
    let mut map = LatLongMap::filled(64, 32, Rgb::BLACK).unwrap();
    map.set(20, 9, Rgb::splat(50.0));
    let env = EnvironmentMap::new(map).unwrap();
    let mut last = f64::INFINITY;
    for n in [1, 2, 4, 8, 16, 32, 64, 128] {
        let s = bake_specular(&env, n, (64, 32)).unwrap();
        let peak = s.texels().iter().map(|c| c.r).fold(0.0, f64::max);
        let above = s.texels().iter().filter(|c| c.r > 0.5 * peak).count() as f64;
        let frac = above / s.texels().len() as f64;
        assert!(frac <= last, "n={n}: {frac} > {last}");
        last = frac;
    }
}

#[test]
fn bundle_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sky.lmap");
    let lights = bake_all(&sun_and_sky(32, 16).unwrap(), &[1, 16], (16, 8)).unwrap();
    save_bundle(&lights, &path).unwrap();
    let back = load_bundle(&path).unwrap();
    assert_eq!(back.exponents(), vec![1, 16]);
    for (a, b) in back
        .diffuse()
        .texels()
        .iter()
        .zip(lights.diffuse().texels())
    {
        for (x, y) in a.to_array().iter().zip(b.to_array()) {
            assert_eq!(*x, y as f32 as f64);
        }
    }
}

#[test]
fn loads_both_file_formats() {
    let dir = tempfile::tempdir().unwrap();
    let env = sun_and_sky(16, 8).unwrap();

    let pfm = dir.path().join("sky.pfm");
    std::fs::write(&pfm, write_pfm(env.map())).unwrap();
    let from_pfm = load_hdr(&pfm).unwrap();
    for (a, b) in from_pfm.texels().iter().zip(env.texels()) {
        assert_eq!(a.g, b.g as f32 as f64);
    }

    let hdr = dir.path().join("sky.hdr");
    std::fs::write(&hdr, write_hdr(env.map(), true)).unwrap();
    let from_hdr = load_hdr(&hdr).unwrap();
    for (a, b) in from_hdr.texels().iter().zip(env.texels()) {
        assert!((a.b - b.b).abs() <= b.b / 128.0);
    }
}

#[test]
fn rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let wide = dir.path().join("wide.pfm");
    let mut bytes = b"PF\n4 1\n-1.0\n".to_vec();
    bytes.extend(std::iter::repeat_n(1f32.to_le_bytes(), 12).flatten());
    std::fs::write(&wide, bytes).unwrap();
    let err = load_hdr(&wide).unwrap_err();
    assert!(matches!(
        err,
        Error::Aspect {
            width: 4,
            height: 1
        }
    ));
    assert!(err.to_string().contains("width ≠ 2×height"));

    let nan = dir.path().join("nan.pfm");
    let mut bytes = b"PF\n2 1\n-1.0\n".to_vec();
    for x in [1.0f32, 1.0, 1.0, 1.0, f32::NAN, 1.0] {
        bytes.extend(x.to_le_bytes());
    }
    std::fs::write(&nan, bytes).unwrap();
    assert!(matches!(
        load_hdr(&nan),
        Err(Error::BadTexel { u: 1, v: 0, .. })
    ));

    let junk = dir.path().join("junk.hdr");
    std::fs::write(&junk, b"hello").unwrap();
    assert!(matches!(load_hdr(&junk), Err(Error::Format { .. })));
    assert!(matches!(
        load_hdr(dir.path().join("missing.hdr")),
        Err(Error::Io(_))
    ));
}
