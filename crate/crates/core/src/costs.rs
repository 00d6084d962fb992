//! Long-term operating cost of a mobile-production fleet: investment plus
//! yearly costs over a planning horizon, per year and per order.
//!
//! Amounts are carried in integer euro cents.

use serde::{Deserialize, Serialize};

/// Euro cents.
pub type Cents = i64;

pub fn to_cents(euros: f64) -> Cents {
    (euros * 100.0).round() as Cents
}

pub fn to_euros(cents: Cents) -> f64 {
    cents as f64 / 100.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostTable {
    pub driver_year_cost: f64,
    pub vehicle_price: f64,
    pub vehicle_maint_per_year: f64,
    pub printer_price: f64,
    pub printer_maint_per_year: f64,
    pub printer_renewal_per_year: f64,
    /// Miles per litre.
    pub fuel_econ: f64,
    /// Euros per litre.
    pub fuel_price: f64,
    pub work_days_per_year: u32,
    pub horizon_years: u32,
}

impl Default for CostTable {
    fn default() -> Self {
        CostTable {
            driver_year_cost: 63_908.0,
            vehicle_price: 54_000.0,
            vehicle_maint_per_year: 5_400.0,
            printer_price: 2_300.0,
            printer_maint_per_year: 345.0,
            printer_renewal_per_year: 650.0,
            fuel_econ: 8.08,
            fuel_price: 1.1,
            work_days_per_year: 250,
            horizon_years: 10,
        }
    }
}

impl CostTable {
    pub fn printer_per_year(&self) -> f64 {
        self.printer_maint_per_year + self.printer_renewal_per_year
    }

    pub fn validate(&self) -> Result<(), String> {
        let money = [
            self.driver_year_cost,
            self.vehicle_price,
            self.vehicle_maint_per_year,
            self.printer_price,
            self.printer_maint_per_year,
            self.printer_renewal_per_year,
            self.fuel_econ,
            self.fuel_price,
        ];
        if money.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err("cost table entries must be positive".into());
        }
        if self.work_days_per_year == 0 || self.horizon_years == 0 {
            return Err("work days and horizon must be positive".into());
        }
        Ok(())
    }
}

/// Operating figures of a fleet, averaged over daily plans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FleetUsage {
    /// Miles driven per day by the whole fleet.
    pub avg_travel_per_day: f64,
    /// Vehicles (drivers) on the road per day.
    pub avg_vehicles: f64,
    pub fleet_to_buy: u32,
    pub printers_to_buy: u32,
    /// Orders per day.
    pub n_customers: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub investment_vehicles: Cents,
    pub investment_printers: Cents,
    pub investment_total: Cents,
    pub yearly_vehicle_maint: Cents,
    pub yearly_printers: Cents,
    pub yearly_drivers: Cents,
    pub yearly_fuel: Cents,
    pub yearly_total: Cents,
    pub total_over_horizon: Cents,
    pub cost_per_year: Cents,
    pub orders_per_year: u64,
    /// Euros.
    pub cost_per_order: f64,
}

pub fn estimate(usage: &FleetUsage, table: &CostTable) -> CostBreakdown {
    let fleet = i64::from(usage.fleet_to_buy);
    let printers = i64::from(usage.printers_to_buy);
    let investment_vehicles = fleet * to_cents(table.vehicle_price);
    let investment_printers = printers * to_cents(table.printer_price);
    let investment_total = investment_vehicles + investment_printers;

    let yearly_vehicle_maint = fleet * to_cents(table.vehicle_maint_per_year);
    let yearly_printers = printers * to_cents(table.printer_per_year());
    let yearly_drivers = to_cents(usage.avg_vehicles * table.driver_year_cost);
    let litres = usage.avg_travel_per_day * f64::from(table.work_days_per_year) / table.fuel_econ;
    let yearly_fuel = to_cents(litres * table.fuel_price);
    let yearly_total = yearly_vehicle_maint + yearly_printers + yearly_drivers + yearly_fuel;

    let years = i64::from(table.horizon_years);
    let total_over_horizon = investment_total + years * yearly_total;
    let cost_per_year = (total_over_horizon as f64 / years as f64).round() as Cents;
    let orders_per_year = u64::from(usage.n_customers) * u64::from(table.work_days_per_year);
    let cost_per_order = if orders_per_year > 0 {
        to_euros(cost_per_year) / orders_per_year as f64
    } else {
        f64::INFINITY
    };
    CostBreakdown {
        investment_vehicles,
        investment_printers,
        investment_total,
        yearly_vehicle_maint,
        yearly_printers,
        yearly_drivers,
        yearly_fuel,
        yearly_total,
        total_over_horizon,
        cost_per_year,
        orders_per_year,
        cost_per_order,
    }
}

pub const CSV_HEADER: &str = "vehicles_to_buy,machines_to_buy,inv_vehicle,inv_printer,inv_total,\
year_vehicle,year_printer,year_drivers,year_fuel,year_total,total_horizon,cost_per_year,orders_per_year,cost_per_order";

/// One CSV row in the column order of [`CSV_HEADER`], euros with one decimal.
pub fn csv_row(usage: &FleetUsage, b: &CostBreakdown) -> String {
    let e = |c: Cents| format!("{:.1}", to_euros(c));
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.1}",
        usage.fleet_to_buy,
        usage.printers_to_buy,
        e(b.investment_vehicles),
        e(b.investment_printers),
        e(b.investment_total),
        e(b.yearly_vehicle_maint),
        e(b.yearly_printers),
        e(b.yearly_drivers),
        e(b.yearly_fuel),
        e(b.yearly_total),
        e(b.total_over_horizon),
        e(b.cost_per_year),
        b.orders_per_year,
        b.cost_per_order,
    )
}
