use pqr_core::codec::{
    bch_decode_format, bch_decode_version, bch_encode_format, bch_encode_version, rs_decode_with_limit, rs_encode,
    syndromes, CodewordBlock,
};
use pqr_core::qr::{deinterleave, interleave, make_blocks, symbol_spec, BlockShape, EcLevel};
use proptest::prelude::*;

const EC: [EcLevel; 4] = [EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H];

fn shapes() -> Vec<BlockShape> {
    let mut out: Vec<BlockShape> = Vec::new();
    for v in 1..=10 {
        for ec in EC {
            for s in symbol_spec(v, ec).unwrap().block_layout {
                if !out
                    .iter()
                    .any(|o| (o.data_len, o.ec_len, o.capacity_t) == (s.data_len, s.ec_len, s.capacity_t))
                {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn corrupted_block() -> impl Strategy<Value = (BlockShape, Vec<u8>, Vec<(usize, u8)>)> {
    prop::sample::select(shapes()).prop_flat_map(|s| {
        let n = s.data_len + s.ec_len;
        (
            Just(s),
            proptest::collection::vec(any::<u8>(), s.data_len),
            proptest::collection::vec((0..n, 1..=255u8), 0..=s.capacity_t),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn corrections_up_to_capacity((shape, data, hits) in corrupted_block()) {
        let block = CodewordBlock::encode(data.clone(), shape.ec_len, shape.capacity_t);
        prop_assert!(syndromes(&block.to_bytes(), shape.ec_len).iter().all(|s| s.0 == 0));
        let mut rx = block.to_bytes();
        let mut positions = std::collections::BTreeSet::new();
        for (p, e) in hits {
            rx[p] ^= e;
            positions.insert(p);
        }
        let fixed = rs_decode_with_limit(&rx, shape.ec_len, shape.capacity_t).unwrap();
        prop_assert_eq!(fixed.data, data);
        // XOR patterns hitting one position twice may cancel out.
        prop_assert!(fixed.errors_corrected <= positions.len());
    }

    #[test]
    fn interleave_round_trip(v in 1..=10u8, e in 0..4usize, seed in any::<u64>()) {
        let spec = symbol_spec(v, EC[e]).unwrap();
        let data: Vec<u8> = (0..spec.data_codewords()).map(|i| (seed.rotate_left(i as u32 % 64) as u8) ^ i as u8).collect();
        let blocks = make_blocks(&data, &spec);
        let stream = interleave(&blocks);
        prop_assert_eq!(stream.len(), spec.total_codewords);
        prop_assert_eq!(deinterleave(&stream, &spec), blocks);
    }

    #[test]
    fn format_words_survive_three_flips(ec in 0..4u8, mask in 0..8u8, flips in proptest::collection::btree_set(0..15usize, 0..=3)) {
        let mut w = bch_encode_format(ec, mask).unwrap();
        for f in flips {
            w ^= 1 << f;
        }
        prop_assert_eq!(bch_decode_format(w).unwrap(), (ec, mask));
    }

    #[test]
    fn version_words_survive_three_flips(v in 7..=40u8, flips in proptest::collection::btree_set(0..18usize, 0..=3)) {
        let mut w = bch_encode_version(v).unwrap();
        for f in flips {
            w ^= 1 << f;
        }
        prop_assert_eq!(bch_decode_version(w).unwrap(), v);
    }
}

#[test]
fn parity_is_linear() {
    // RS parity is linear over GF(2^8) addition: p(a ^ b) = p(a) ^ p(b).
    let a: Vec<u8> = (0..19u8).collect();
    let b: Vec<u8> = (0..19u8).map(|i| i.wrapping_mul(37) ^ 0x5A).collect();
    let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
    let (pa, pb, pab) = (rs_encode(&a, 7), rs_encode(&b, 7), rs_encode(&ab, 7));
    let sum: Vec<u8> = pa.iter().zip(&pb).map(|(x, y)| x ^ y).collect();
    assert_eq!(pab, sum);
}
