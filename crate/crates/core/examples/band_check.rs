// quick diagnostic
use stealthbench_core::{imageio, ops, synth};
fn main() {
    for seed in [1u64, 7, 13, 42, 99] {
        let img = synth::textured(512, 512, seed);
        for q in [90u8, 85, 75] {
            let bytes = imageio::encode_jpeg(&img, q, imageio::ChromaSubsampling::S420).unwrap();
            let back = imageio::decode_bytes(&bytes).unwrap();
            let st = ops::distortion_stats(&img, &back).unwrap();
            println!("seed {seed} q{q}: psnr {:.2} mad {:.2} changed {:.3} bytes {}", st.psnr, st.mean_abs_diff, st.changed_fraction, bytes.len());
        }
        let png = imageio::encode_png_canonical(&img).unwrap();
        println!("seed {seed}: png bytes {}", png.len());
    }
}
