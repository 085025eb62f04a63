use rulescan_core::geometry::{hough_lines, project_to_ground, HoughParams};
use rulescan_core::pointcloud::PointCloud;
use nalgebra::Point3;

fn line_cloud(from: [f64; 2], to: [f64; 2], spacing: f64) -> Vec<Point3<f64>> {
    let len = ((to[0] - from[0]).powi(2) + (to[1] - from[1]).powi(2)).sqrt();
    let dir = [(to[0] - from[0]) / len, (to[1] - from[1]) / len];
    let n = (len / spacing).ceil() as usize;
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let j = 0.01 * ((i as f64 * 0.7).sin());
            Point3::new(
                from[0] + t * (to[0] - from[0]) - j * dir[1],
                from[1] + t * (to[1] - from[1]) + j * dir[0],
                1.0,
            )
        })
        .collect()
}

fn main() {
    let params = HoughParams { rho_res: 0.05, theta_res: std::f64::consts::PI / 180.0, min_votes: 40, min_length: 1.0 };
    let mut pts = line_cloud([0.0, 2.0], [2.5, 2.0], 0.01);
    pts.extend(line_cloud([3.0, 2.0], [6.0, 2.0], 0.01));
    pts.push(Point3::new(0.0, 0.0, 1.0));
    pts.push(Point3::new(6.0, 4.0, 1.0));
    let grid = project_to_ground(&PointCloud::new(pts), 0.05, None).unwrap();
    let segs = hough_lines(&grid, &params).unwrap();
    for s in &segs {
        println!("votes {:4}  rho {:7.3} theta {:7.2}deg  len {:6.3}  p0 {:?} p1 {:?}", s.votes, s.rho, s.theta.to_degrees(), s.length(), s.p0, s.p1);
    }
}
