use std::fs;
use std::path::Path;

use blockwatch_core::frame_io::{load_frame_sequence, FrameReader, PixelLayout, SourceSpec};
use blockwatch_core::{Error, LumaFrame};
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_plane(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.next_u32() as u8).collect()
}

fn encode_y4m(path: &Path, w: usize, h: usize, colorspace: y4m::Colorspace, planes: &[[Vec<u8>; 3]]) {
    let file = fs::File::create(path).unwrap();
    let mut enc = y4m::encode(w, h, y4m::Ratio::new(25, 1))
        .with_colorspace(colorspace)
        .write_header(file)
        .unwrap();
    for p in planes {
        enc.write_frame(&y4m::Frame::new([&p[0], &p[1], &p[2]], None)).unwrap();
    }
}

#[test]
fn y4m_luma_agrees_with_reference_decoder() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cases = [
        (33, 17, y4m::Colorspace::C420, 33usize.div_ceil(2) * 17usize.div_ceil(2)),
        (20, 12, y4m::Colorspace::C422, 10 * 12),
        (9, 7, y4m::Colorspace::C444, 9 * 7),
        (16, 8, y4m::Colorspace::Cmono, 0),
    ];
    for (i, (w, h, cs, chroma)) in cases.into_iter().enumerate() {
        let path = dir.path().join(format!("clip{i}.y4m"));
        let planes: Vec<[Vec<u8>; 3]> = (0..3)
            .map(|_| {
                [
                    random_plane(&mut rng, w * h),
                    random_plane(&mut rng, chroma),
                    random_plane(&mut rng, chroma),
                ]
            })
            .collect();
        encode_y4m(&path, w, h, cs, &planes);

        let mut reference = y4m::decode(fs::File::open(&path).unwrap()).unwrap();
        let ours = load_frame_sequence(&SourceSpec::y4m(&path)).unwrap();
        assert_eq!(ours.len(), 3);
        for (n, frame) in ours.iter().enumerate() {
            let theirs = reference.read_frame().unwrap();
            assert_eq!((frame.width(), frame.height()), (w, h));
            assert_eq!(frame.samples(), theirs.get_y_plane(), "clip {i} frame {n}");
            assert_eq!(frame.frame_index(), n);
        }
    }
}

#[test]
fn raw_layouts_keep_only_luma() {
    let dir = tempfile::tempdir().unwrap();
    let (w, h) = (6, 4);
    for (layout, stride) in [
        (PixelLayout::Yuv420, 36),
        (PixelLayout::Yuv422, 48),
        (PixelLayout::YOnly, 24),
    ] {
        let mut bytes = Vec::new();
        for f in 0..3u8 {
            bytes.extend(std::iter::repeat_n(10 + f, w * h));
            bytes.extend(std::iter::repeat_n(200, stride - w * h));
        }
        let path = dir.path().join(format!("{layout}.yuv"));
        fs::write(&path, &bytes).unwrap();
        let frames = load_frame_sequence(&SourceSpec::raw(&path, w, h, layout)).unwrap();
        assert_eq!(frames.len(), 3);
        for (f, frame) in frames.iter().enumerate() {
            assert!(frame.samples().iter().all(|&s| s == 10 + f as u8));
        }
    }
}

#[test]
fn raw_size_must_divide_into_frames() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.yuv");
    fs::write(&path, vec![0u8; 100]).unwrap();
    let err = FrameReader::open(&SourceSpec::raw(&path, 8, 8, PixelLayout::Yuv420))
        .err()
        .unwrap();
    assert!(matches!(err, Error::GeometryMismatch { len: 100, stride: 96 }), "{err}");
}

#[test]
fn raw_requires_geometry() {
    let mut spec = SourceSpec::raw("x.yuv", 8, 8, PixelLayout::YOnly);
    spec.geometry = None;
    assert!(FrameReader::open(&spec).is_err());
    let mut spec = SourceSpec::y4m("x.y4m");
    spec.geometry = Some((8, 8));
    assert!(FrameReader::open(&spec).is_err());
}

#[test]
fn missing_file_is_io_error() {
    let err = FrameReader::open(&SourceSpec::y4m("/nonexistent/clip.y4m"))
        .err()
        .unwrap();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn pgm_sequence_in_name_order() {
    let dir = tempfile::tempdir().unwrap();
    for (name, value) in [("b.pgm", 2u8), ("a.pgm", 1), ("c.pgm", 3)] {
        let mut bytes = b"P5\n4 3\n255\n".to_vec();
        bytes.extend(std::iter::repeat_n(value, 12));
        fs::write(dir.path().join(name), bytes).unwrap();
    }
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let frames = load_frame_sequence(&SourceSpec::image_sequence(dir.path())).unwrap();
    let firsts: Vec<u8> = frames.iter().map(|f: &LumaFrame| f.get(0, 0)).collect();
    assert_eq!(firsts, vec![1, 2, 3]);
    assert_eq!(frames[2].frame_index(), 2);
}

#[test]
fn pgm_sequence_rejects_size_change() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("0.pgm"),
        [b"P5\n3 3\n255\n".as_slice(), &[0; 9]].concat(),
    )
    .unwrap();
    fs::write(
        dir.path().join("1.pgm"),
        [b"P5\n4 3\n255\n".as_slice(), &[0; 12]].concat(),
    )
    .unwrap();
    assert!(load_frame_sequence(&SourceSpec::image_sequence(dir.path())).is_err());
}
